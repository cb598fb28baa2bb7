use proptest::prelude::*;
use sqzc_cli::config::{OutputFormat, PlotQuantity, SweepAxis, Tier, VariantConfig, SWEEP_VARIABLES};
use sqzc_cli::ScenarioConfig;
use sqzc_core::effective::CircuitParams;
use sqzc_core::fock::{HamiltonianVariant, HilbertConfig};

fn base() -> ScenarioConfig {
    ScenarioConfig::from_json(r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}}"#).unwrap()
}

prop_compose! {
    fn circuit()(kappa1 in 0.5f64..100.0, frac in 0.0f64..0.49, phase in -3.0f64..3.0, g in 0.0f64..80.0,
                 dq in 100.0f64..2000.0, d12 in -10.0f64..10.0) -> CircuitParams {
        CircuitParams { kappa1, eps1_mag: frac * kappa1, eps1_phase: phase, g, delta_q: dq, delta12: d12, ..CircuitParams::default() }
    }
}

prop_compose! {
    fn axis(variable: &'static str)(start in -5.0f64..5.0, span in 0.0f64..5.0, points in 1usize..40) -> SweepAxis {
        SweepAxis { variable: variable.into(), start, stop: start + span, points }
    }
}

proptest! {
    #[test]
    fn parse_of_emit_is_identity(
        c in circuit(),
        n1 in 2usize..12, n2 in 2usize..60, qubit in any::<bool>(),
        a in axis("g"), b in axis("eps1_phase"), axes in 0usize..3,
        tier in prop_oneof![Just(Tier::Gaussian), Just(Tier::Fock), Just(Tier::Both)],
        damping in 0.05f64..1.0,
        variant_g in proptest::option::of(0.0f64..80.0),
        plot in prop_oneof![Just(PlotQuantity::VarMin), Just(PlotQuantity::VarP), Just(PlotQuantity::MomentError)],
        reference in proptest::option::of(0.0f64..0.5),
        mhz in proptest::option::of(0.1f64..10.0),
    ) {
        let mut cfg = base();
        cfg.circuit = c;
        cfg.kappa2_mhz = mhz;
        if let Some(k) = mhz {
            cfg.circuit.kappa2 = k;
        }
        cfg.truncation = HilbertConfig { n1, n2, include_qubit: qubit };
        cfg.sweep = [a, b].into_iter().take(axes).collect();
        cfg.solver.tier = tier;
        cfg.solver.damping = damping;
        cfg.variants = vec![VariantConfig {
            label: "v1".into(), g: variant_g, delta_q: None, eps1_mag: None, delta12: None,
            truncation: None, hamiltonian: Some(HamiltonianVariant::Full), refine_fock: None,
        }];
        cfg.output.plot = plot;
        cfg.output.reference_line = reference;
        cfg.output.formats = vec![OutputFormat::Csv, OutputFormat::Svg];
        prop_assume!(cfg.validate().is_ok());
        prop_assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}

#[test]
fn sweep_variables_all_accepted() {
    for v in SWEEP_VARIABLES {
        let mut cfg = base();
        cfg.sweep = vec![SweepAxis { variable: v.into(), start: 0.0, stop: 1.0, points: 2 }];
        cfg.validate().unwrap();
    }
}

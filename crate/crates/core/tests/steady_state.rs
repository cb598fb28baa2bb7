use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use sqzc_core::effective::CircuitParams;
use sqzc_core::fock::*;

fn liouvillian(p: &CircuitParams, cfg: &HilbertConfig) -> Liouvillian {
    let h = build_hamiltonian(p, cfg, HamiltonianVariant::Full).unwrap();
    let c = build_collapse(p, cfg, HamiltonianVariant::Full).unwrap();
    build_liouvillian(&h, &c).unwrap()
}

/// Right singular vector of the smallest singular value of the dense
/// superoperator, scaled to unit trace.
fn dense_null_space(l: &Liouvillian) -> Vec<Complex64> {
    let d = l.dim();
    let sup = l.superoperator();
    let mut m = Mat::<Complex64>::zeros(d * d, d * d);
    for (i, j, v) in sup.triplets() {
        m[(i, j)] = v;
    }
    let svd = m.svd().unwrap();
    let s = svd.S();
    let n = d * d;
    assert!(s[n - 1].re < 1e-10 * s[0].re, "no null vector");
    assert!(s[n - 2].re > 1e-6 * s[0].re, "null space is degenerate");
    let v: Vec<Complex64> = (0..n).map(|k| svd.V()[(k, n - 1)]).collect();
    let tr: Complex64 = (0..d).map(|k| v[k * d + k]).sum();
    v.iter().map(|z| z / tr).collect()
}

fn params_small() -> CircuitParams {
    CircuitParams { kappa1: 6.0, eps1_mag: 1.2, eps1_phase: 0.4, g: 2.0, delta_q: 9.0, delta12: 0.3, ..CircuitParams::default() }
}

#[test]
fn direct_and_evolve_match_dense_null_space() {
    let cfg = HilbertConfig::new(3, 4, true).unwrap();
    let l = liouvillian(&params_small(), &cfg);
    let oracle = dense_null_space(&l);
    for method in [SteadyMethod::Direct, SteadyMethod::Evolve, SteadyMethod::Krylov] {
        let s = steady_state(&l, &SteadyOptions { method, ..SteadyOptions::default() }, None).unwrap();
        let diff = s.rho.matrix.as_slice().iter().zip(&oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{method:?}: {diff:e}");
    }
}

#[test]
fn reduced_state_consistency() {
    let cfg = HilbertConfig::new(3, 6, true).unwrap();
    let p = params_small();
    let s = solve_steady(&p, &cfg, HamiltonianVariant::Full, &SteadyOptions::default(), None).unwrap();
    let ops = build_operators(&cfg).unwrap();
    let n_full = expect(&ops.op(ops.n2()), &s.rho).unwrap();
    assert!(n_full.im.abs() < 1e-12);
    let rho2 = cavity2_state(&s.rho).unwrap();
    let m = moments(&rho2).unwrap();
    assert!((m.n_bar - n_full.re).abs() < 1e-12);
    let pn = number_distribution(&rho2).unwrap();
    let first: f64 = pn.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    assert!((first - n_full.re).abs() < 1e-12);
    assert!((pn.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    let aa = expect(&ops.op(ops.a2.matmul(&ops.a2)), &s.rho).unwrap();
    assert!((aa - m.aa).norm() < 1e-12);
    assert!(m.mean.norm() < 1e-6);
}

#[test]
fn phase_covariance() {
    let cfg = HilbertConfig::new(3, 6, true).unwrap();
    let observe = |phase: f64| {
        let p = CircuitParams { eps1_phase: phase, ..params_small() };
        let s = solve_steady(&p, &cfg, HamiltonianVariant::Full, &SteadyOptions::default(), None).unwrap();
        let r = cavity2_state(&s.rho).unwrap();
        (min_variance_fock(&r).unwrap().1, number_distribution(&r).unwrap(), moment_error(&r).unwrap().percent)
    };
    let (v0, p0, e0) = observe(0.0);
    for phase in [0.7, PI / 2.0, 2.9] {
        let (v, p, e) = observe(phase);
        assert!((v - v0).abs() < 1e-6);
        assert!(p.iter().zip(&p0).all(|(a, b)| (a - b).abs() < 1e-6));
        assert!((e - e0).abs() < 1e-6);
    }
}

#[test]
fn undriven_steady_state_is_vacuum() {
    let cfg = HilbertConfig::new(3, 4, true).unwrap();
    let p = CircuitParams { eps1_mag: 0.0, g: 56.0, delta_q: 600.0, delta12: 4.95, ..CircuitParams::default() };
    let s = solve_steady(&p, &cfg, HamiltonianVariant::Full, &SteadyOptions::default(), None).unwrap();
    let vacuum = DensityMatrix::basis_state(Layout::Full { config: cfg }, cfg.index(0, 0, 0));
    assert!(s.rho.matrix.max_abs_diff(&vacuum.matrix) < 1e-10);
    let rho2 = cavity2_state(&s.rho).unwrap();
    assert!((min_variance_fock(&rho2).unwrap().1 - 0.5).abs() < 1e-10);
}

#[test]
fn truncation_report_of_vacuum_has_no_shift() {
    let cfg = HilbertConfig::new(2, 14, false).unwrap();
    let p = CircuitParams { eps1_mag: 0.0, ..CircuitParams::default() };
    let r = truncation_report(&p, &cfg, HamiltonianVariant::Full, &SteadyOptions::default()).unwrap();
    assert!(r.n_bar_shift < 1e-6 && r.var_min_shift < 1e-6);
    assert!(!r.unconverged);
    assert_eq!(r.reduced.n2, 4);
}

#[test]
fn state_file_round_trip() {
    let cfg = HilbertConfig::new(3, 4, true).unwrap();
    let p = params_small();
    let s = solve_steady(&p, &cfg, HamiltonianVariant::Full, &SteadyOptions::default(), None).unwrap();
    let path = std::env::temp_dir().join(format!("sqzc-steady-{}.sqzc", std::process::id()));
    write_state(&path, &s.rho, Some(&p), Some(HamiltonianVariant::Full)).unwrap();
    let (back, header) = read_state(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back, s.rho);
    assert_eq!(header.params, Some(p));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn randomized_steady_state_invariants(
        kappa1 in 2.0f64..60.0,
        eps_frac in 0.0f64..0.35,
        phase in -PI..PI,
        g in 0.0f64..3.0,
        delta_q in 4.0f64..20.0,
        delta12 in -2.0f64..2.0,
        qubit in any::<bool>(),
    ) {
        let cfg = HilbertConfig::new(3, 5, qubit).unwrap();
        let p = CircuitParams {
            kappa1, eps1_mag: eps_frac * kappa1, eps1_phase: phase, g, delta_q, delta12, ..CircuitParams::default()
        };
        let l = liouvillian(&p, &cfg);
        prop_assert!(l.trace_preservation_error() < 1e-10);
        let s = steady_state(&l, &SteadyOptions::default(), None).unwrap();
        let d = s.rho.diagnostics().unwrap();
        prop_assert!(d.hermiticity_error <= 1e-10);
        prop_assert!(d.trace_error <= 1e-8);
        prop_assert!(d.min_eigenvalue >= -1e-8);
        prop_assert!(relative_residual(&l, s.rho.matrix.as_slice()) <= 1e-8);
        let rho2 = cavity2_state(&s.rho).unwrap();
        prop_assert!(moments(&rho2).unwrap().mean.norm() <= 1e-6);
    }
}

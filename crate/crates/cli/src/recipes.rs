//! Built-in scenarios reproducing the published figures.

use std::str::FromStr;

use sqzc_core::effective::CircuitParams;
use sqzc_core::fock::{GridSpec, HamiltonianVariant, HilbertConfig};

use crate::config::{
    AnalysisConfig, DetuningSearch, OutputConfig, OutputFormat, PlotQuantity, ScenarioConfig, SolverConfig, SweepAxis, Tier, VariantConfig,
};
use crate::error::CliError;

pub const KAPPA1: f64 = 50.0;
pub const G: f64 = 56.0;
pub const DELTA_Q: f64 = 600.0;
pub const DELTA_Q_FAR: f64 = 1200.0;
pub const EPS1_RANGE: (f64, f64) = (1.0, 13.0);
pub const FIG5_EPS1: f64 = 10.0;
pub const FIG5_DELTA12: f64 = 4.95;
pub const FIG3_EPS1: [f64; 2] = [10.0, 12.0];
/// Bare-detuning window searched for the optimum.
pub const DETUNING_WINDOW: (f64, f64) = (-3.0, 10.0);
/// Effective-detuning axis of the squeezing contour.
pub const CONTOUR_DETUNING: (f64, f64) = (-1.5, 1.5);
/// Fraction of the vacuum variance reachable inside a parametric amplifier.
pub const AMPLIFIER_LIMIT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FromStr for Recipe {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "fig1" => Ok(Recipe::Fig1),
            "fig2" => Ok(Recipe::Fig2),
            "fig3" => Ok(Recipe::Fig3),
            "fig4" => Ok(Recipe::Fig4),
            "fig5" => Ok(Recipe::Fig5),
            other => Err(CliError::Config(format!("unknown recipe '{other}' (expected fig1..fig5)"))),
        }
    }
}

/// Resolution knobs shared by all recipes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RecipeOptions {
    /// Points per sweep axis, or Wigner grid points per side for `fig3`.
    pub points: Option<usize>,
    /// Run qubit variants at `n1 = 10, n2 = 50` instead of `n1 = 5, n2 = 30`.
    pub full_truncation: bool,
    /// Overrides the `fig1` pump axis.
    pub eps1_range: Option<(f64, f64)>,
}

fn base_circuit(eps1: f64) -> CircuitParams {
    CircuitParams { kappa1: KAPPA1, kappa2: 1.0, eps1_mag: eps1, g: G, delta_q: DELTA_Q, ..CircuitParams::default() }
}

fn full() -> HilbertConfig {
    HilbertConfig { n1: 10, n2: 50, include_qubit: true }
}

fn reduced() -> HilbertConfig {
    HilbertConfig { n1: 5, n2: 30, include_qubit: true }
}

fn no_qubit(truncation: HilbertConfig) -> VariantConfig {
    VariantConfig {
        label: "no_qubit".into(),
        g: Some(0.0),
        delta_q: Some(0.0),
        eps1_mag: None,
        delta12: None,
        truncation: Some(HilbertConfig { include_qubit: false, ..truncation }),
        hamiltonian: None,
        refine_fock: Some(false),
    }
}

fn qubit_variant(label: &str, delta_q: f64, truncation: HilbertConfig) -> VariantConfig {
    VariantConfig {
        label: label.into(),
        g: None,
        delta_q: Some(delta_q),
        eps1_mag: None,
        delta12: None,
        truncation: Some(truncation),
        hamiltonian: None,
        refine_fock: None,
    }
}

fn eps1_axis(points: usize, range: (f64, f64)) -> SweepAxis {
    SweepAxis { variable: "eps1_mag".into(), start: range.0, stop: range.1, points }
}

fn search(refine_fock: bool) -> Option<DetuningSearch> {
    Some(DetuningSearch { window: DETUNING_WINDOW, refine_fock, fock_half_width: 0.5, fock_scan_points: 5, fock_tolerance: 2e-3 })
}

fn output(name: &str, plot: PlotQuantity, reference_line: Option<f64>) -> OutputConfig {
    OutputConfig { name: name.into(), formats: vec![OutputFormat::Csv, OutputFormat::Svg], plot, reference_line, ..OutputConfig::default() }
}

pub fn recipe(r: Recipe, o: RecipeOptions) -> ScenarioConfig {
    let qubit_truncation = if o.full_truncation { full() } else { reduced() };
    let base = ScenarioConfig {
        circuit: base_circuit(0.0),
        kappa2_mhz: None,
        truncation: reduced(),
        sweep: vec![],
        variants: vec![],
        solver: SolverConfig::default(),
        analysis: AnalysisConfig::default(),
        output: OutputConfig::default(),
    };
    match r {
        Recipe::Fig1 => {
            let n = o.points.unwrap_or(61);
            let (lo, hi) = CONTOUR_DETUNING;
            ScenarioConfig {
                sweep: vec![
                    SweepAxis { variable: "delta12_effective".into(), start: lo, stop: hi, points: n },
                    eps1_axis(o.points.unwrap_or(25), o.eps1_range.unwrap_or(EPS1_RANGE)),
                ],
                output: output("fig1", PlotQuantity::VarP, None),
                ..base
            }
        }
        Recipe::Fig2 => ScenarioConfig {
            sweep: vec![eps1_axis(o.points.unwrap_or(13), EPS1_RANGE)],
            variants: vec![
                no_qubit(full()),
                qubit_variant("dq600", DELTA_Q, qubit_truncation),
                qubit_variant("dq1200", DELTA_Q_FAR, qubit_truncation),
            ],
            solver: SolverConfig { tier: Tier::Both, optimize_detuning: search(true), ..SolverConfig::default() },
            analysis: AnalysisConfig { truncation_report: true, ..AnalysisConfig::default() },
            output: output("fig2", PlotQuantity::VarMin, Some(AMPLIFIER_LIMIT)),
            ..base
        },
        Recipe::Fig3 => {
            let n = o.points.unwrap_or(201);
            let [low, high] = FIG3_EPS1;
            let mut dispersive = qubit_variant("dispersive", DELTA_Q, HilbertConfig { include_qubit: false, ..qubit_truncation });
            dispersive.hamiltonian = Some(HamiltonianVariant::Dispersive);
            let mut strong = qubit_variant("full_eps12", DELTA_Q, qubit_truncation);
            strong.eps1_mag = Some(high);
            ScenarioConfig {
                circuit: base_circuit(low),
                variants: vec![no_qubit(qubit_truncation), qubit_variant("full", DELTA_Q, qubit_truncation), dispersive, strong],
                solver: SolverConfig { tier: Tier::Fock, optimize_detuning: search(true), ..SolverConfig::default() },
                analysis: AnalysisConfig { wigner: Some(GridSpec { nx: n, np: n, ..GridSpec::default() }), ..AnalysisConfig::default() },
                output: output("fig3", PlotQuantity::VarMin, None),
                ..base
            }
        }
        Recipe::Fig4 => ScenarioConfig {
            sweep: vec![eps1_axis(o.points.unwrap_or(13), EPS1_RANGE)],
            variants: vec![qubit_variant("dq600", DELTA_Q, qubit_truncation), qubit_variant("dq1200", DELTA_Q_FAR, qubit_truncation)],
            solver: SolverConfig { tier: Tier::Fock, optimize_detuning: search(true), ..SolverConfig::default() },
            output: output("fig4", PlotQuantity::MomentError, None),
            ..base
        },
        Recipe::Fig5 => ScenarioConfig {
            circuit: CircuitParams { delta12: FIG5_DELTA12, ..base_circuit(FIG5_EPS1) },
            truncation: full(),
            solver: SolverConfig { tier: Tier::Fock, ..SolverConfig::default() },
            analysis: AnalysisConfig { number_distribution: true, ..AnalysisConfig::default() },
            output: output("fig5", PlotQuantity::VarMin, None),
            ..base
        },
    }
}

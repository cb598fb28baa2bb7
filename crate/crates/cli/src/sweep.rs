//! Sweep expansion and per-point evaluation over both tiers.

use std::f64::consts::PI;

use log::info;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use sqzc_core::effective::CircuitParams;
use sqzc_core::fock::{
    cavity2_state, min_variance_fock, moment_error, moments, number_distribution, optimum_detuning_fock, quadrature_variance_fock, solve_steady,
    truncation_report_from, wigner, FockOptimumOptions, HamiltonianVariant, HilbertConfig, SteadyMethod, SteadyState, TruncationReport, WignerGrid,
};
use sqzc_core::gaussian::{optimum_detuning, quadrature_variance, self_consistent_solve_with, squeezing_db, GaussianSolution, Mode};
use sqzc_core::Error;

use crate::config::{DetuningSearch, ScenarioConfig, VariantConfig};

/// One grid point of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub series: String,
    /// Index of the point within its series, in grid order.
    pub index: usize,
    /// Sweep coordinates in normalized units, in axis order.
    pub coords: Vec<f64>,
    pub circuit: CircuitParams,
    pub truncation: HilbertConfig,
    pub hamiltonian: HamiltonianVariant,
    pub delta12_effective: Option<f64>,
    pub refine_fock: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub kind: &'static str,
    pub message: String,
}

impl From<Error> for PointFailure {
    fn from(e: Error) -> Self {
        PointFailure { kind: error_kind(&e), message: e.to_string() }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Singular { .. } => "singular",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::UnstableDrift { .. } => "unstable_drift",
        Error::AboveThreshold { .. } => "above_threshold",
        Error::QuadratureNonConvergence { .. } => "quadrature_non_convergence",
        Error::StepUnderflow { .. } => "step_underflow",
        Error::NonConvergence { .. } => "non_convergence",
        Error::KrylovNonConvergence { .. } => "krylov_non_convergence",
        Error::NoBracket { .. } => "no_bracket",
        Error::ResidualTooLarge { .. } => "residual_too_large",
        Error::NotPositive { .. } => "not_positive",
        Error::MemoryBudget { .. } => "memory_budget",
        Error::ConfigMismatch(_) => "config_mismatch",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Eigen(_) => "eigen",
        Error::Format(_) => "format",
        Error::Io { .. } => "io",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianRecord {
    pub delta12: f64,
    pub delta12_effective: f64,
    pub var_min: f64,
    pub theta_min: f64,
    pub var_p: f64,
    pub squeezing_db: f64,
    pub n_bar: f64,
    pub eps_converged: Complex64,
    pub iterations: usize,
    pub residual: f64,
    pub amplifier_unstable: bool,
    pub cavity_unstable: bool,
}

impl GaussianRecord {
    fn new(delta12: f64, s: &GaussianSolution) -> Self {
        let (theta_min, var_min) = s.min_variance();
        GaussianRecord {
            delta12,
            delta12_effective: s.effective_detuning,
            var_min,
            theta_min,
            var_p: quadrature_variance(&s.moments, Mode::Two, PI / 2.0),
            squeezing_db: squeezing_db(var_min),
            n_bar: s.n_bar(),
            eps_converged: s.eps_converged,
            iterations: s.iterations,
            residual: s.residual,
            amplifier_unstable: s.stability.amplifier_unstable,
            cavity_unstable: s.stability.cavity_unstable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockRecord {
    pub delta12: f64,
    pub var_min: f64,
    pub theta_min: f64,
    pub var_p: f64,
    pub squeezing_db: f64,
    pub n_bar: f64,
    pub aa: Complex64,
    pub mean_abs: f64,
    pub moment_error: f64,
    pub moment_error_undefined: bool,
    pub residual: f64,
    pub iterations: usize,
    pub method: SteadyMethod,
    pub truncation: Option<TruncationReport>,
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub spec: PointSpec,
    pub gaussian: Option<Result<GaussianRecord, PointFailure>>,
    pub fock: Option<Result<FockRecord, PointFailure>>,
    pub wigner: Option<WignerGrid>,
    /// Simulated and ideal squeezed `P(N)`.
    pub distribution: Option<(Vec<f64>, Vec<f64>)>,
}

impl PointResult {
    pub fn failures(&self) -> impl Iterator<Item = &PointFailure> {
        let g = self.gaussian.as_ref().and_then(|r| r.as_ref().err());
        let f = self.fock.as_ref().and_then(|r| r.as_ref().err());
        g.into_iter().chain(f)
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axes: Vec<String>,
    pub points: Vec<PointResult>,
}

fn series(cfg: &ScenarioConfig) -> Vec<Option<&VariantConfig>> {
    if cfg.variants.is_empty() {
        vec![None]
    } else {
        cfg.variants.iter().map(Some).collect()
    }
}

/// All points in deterministic order: series, then the first axis, then
/// the second.
pub fn expand(cfg: &ScenarioConfig) -> Vec<PointSpec> {
    let axes: Vec<Vec<f64>> = cfg.sweep.iter().map(|a| cfg.sweep_values(a)).collect();
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for values in &axes {
        grid = grid.into_iter().flat_map(|prefix| values.iter().map(move |&v| [prefix.clone(), vec![v]].concat())).collect();
    }
    let mut out = Vec::new();
    for v in series(cfg) {
        let (base, truncation, hamiltonian) = cfg.variant_setup(v);
        let refine = v.and_then(|v| v.refine_fock).or(cfg.solver.optimize_detuning.map(|s| s.refine_fock)).unwrap_or(false);
        for (index, coords) in grid.iter().enumerate() {
            let mut circuit = base;
            let mut delta12_effective = None;
            for (axis, &x) in cfg.sweep.iter().zip(coords) {
                match axis.variable.as_str() {
                    "kappa1" => circuit.kappa1 = x,
                    "kappa2" => circuit.kappa2 = x,
                    "eps1_mag" => circuit.eps1_mag = x,
                    "eps1_phase" => circuit.eps1_phase = x,
                    "g" => circuit.g = x,
                    "delta_q" => circuit.delta_q = x,
                    "delta12" => circuit.delta12 = x,
                    "delta12_effective" => delta12_effective = Some(x),
                    other => unreachable!("validated sweep variable {other}"),
                }
            }
            out.push(PointSpec {
                series: v.map_or_else(|| "base".to_string(), |v| v.label.clone()),
                index,
                coords: coords.clone(),
                circuit,
                truncation,
                hamiltonian,
                delta12_effective,
                refine_fock: refine,
            });
        }
    }
    out
}

fn gaussian_point(cfg: &ScenarioConfig, spec: &PointSpec) -> Result<GaussianRecord, Error> {
    let p = &spec.circuit;
    p.validate()?;
    match &cfg.solver.optimize_detuning {
        Some(search) => {
            let opt = optimum_detuning(p, p.eps1_mag, search.window, &cfg.solver.gaussian_options(None))?;
            Ok(GaussianRecord::new(opt.delta12, &opt.solution))
        }
        None => {
            let s = self_consistent_solve_with(p, &cfg.solver.gaussian_options(spec.delta12_effective), Complex64::new(0.0, 0.0))?;
            Ok(GaussianRecord::new(p.delta12, &s))
        }
    }
}

/// Steady state of the point and the circuit it was solved for.
fn fock_state(
    cfg: &ScenarioConfig,
    spec: &PointSpec,
    gaussian: Option<&Result<GaussianRecord, PointFailure>>,
) -> Result<(SteadyState, CircuitParams), PointFailure> {
    let steady = cfg.solver.steady_options();
    let mut p = spec.circuit;
    let Some(search) = cfg.solver.optimize_detuning else {
        return Ok((solve_steady(&p, &spec.truncation, spec.hamiltonian, &steady, None)?, p));
    };
    let center = match gaussian {
        Some(Ok(g)) => g.delta12,
        Some(Err(e)) => return Err(PointFailure { kind: e.kind, message: format!("no Gaussian detuning optimum: {}", e.message) }),
        None => unreachable!("Gaussian optimum computed whenever the detuning is optimized"),
    };
    if !spec.refine_fock {
        p.delta12 = center;
        return Ok((solve_steady(&p, &spec.truncation, spec.hamiltonian, &steady, None)?, p));
    }
    let DetuningSearch { fock_half_width, fock_scan_points, fock_tolerance, .. } = search;
    let opts = FockOptimumOptions { scan_points: fock_scan_points, tolerance: fock_tolerance, steady };
    let window = (center - fock_half_width, center + fock_half_width);
    let opt = optimum_detuning_fock(&p, &spec.truncation, spec.hamiltonian, window, &opts)?;
    Ok((opt.state, p.with_delta12(opt.delta12)))
}

fn fock_point(cfg: &ScenarioConfig, spec: &PointSpec, gaussian: Option<&Result<GaussianRecord, PointFailure>>, out: &mut PointResult) -> Result<FockRecord, PointFailure> {
    let (state, params) = fock_state(cfg, spec, gaussian)?;
    let rho2 = cavity2_state(&state.rho)?;
    let m = moments(&rho2)?;
    let (theta_min, var_min) = min_variance_fock(&rho2)?;
    let me = moment_error(&rho2)?;
    let truncation = if cfg.analysis.truncation_report {
        Some(truncation_report_from(&state, &params, spec.hamiltonian, &cfg.solver.steady_options())?)
    } else {
        None
    };
    if let Some(grid) = &cfg.analysis.wigner {
        out.wigner = Some(wigner(&rho2, grid)?);
    }
    if cfg.analysis.number_distribution {
        let p = number_distribution(&rho2)?;
        let ideal = sqzc_core::fock::ideal_squeezed_distribution(m.n_bar, p.len());
        out.distribution = Some((p, ideal));
    }
    Ok(FockRecord {
        delta12: params.delta12,
        var_min,
        theta_min,
        var_p: quadrature_variance_fock(&rho2, PI / 2.0)?,
        squeezing_db: squeezing_db(var_min),
        n_bar: m.n_bar,
        aa: m.aa,
        mean_abs: m.mean.norm(),
        moment_error: me.percent,
        moment_error_undefined: me.undefined,
        residual: state.residual,
        iterations: state.iterations,
        method: state.method,
        truncation,
    })
}

/// Steady state of a single point, computing the Gaussian optimum first when
/// the detuning is optimized.
pub fn point_state(cfg: &ScenarioConfig, spec: &PointSpec) -> Result<(SteadyState, CircuitParams), PointFailure> {
    let gaussian = cfg.solver.optimize_detuning.is_some().then(|| gaussian_point(cfg, spec).map_err(PointFailure::from));
    fock_state(cfg, spec, gaussian.as_ref())
}

pub fn evaluate(cfg: &ScenarioConfig, spec: &PointSpec) -> PointResult {
    let mut out = PointResult { spec: spec.clone(), gaussian: None, fock: None, wigner: None, distribution: None };
    let need_gaussian = cfg.solver.tier.gaussian() || (cfg.solver.tier.fock() && cfg.solver.optimize_detuning.is_some());
    let gaussian = need_gaussian.then(|| gaussian_point(cfg, spec).map_err(PointFailure::from));
    if cfg.solver.tier.fock() {
        let f = fock_point(cfg, spec, gaussian.as_ref(), &mut out);
        out.fock = Some(f);
    }
    if cfg.solver.tier.gaussian() {
        out.gaussian = gaussian;
    }
    info!("{} #{}: done", spec.series, spec.index);
    out
}

/// Evaluates every point on the current rayon pool; results keep grid order.
pub fn run_sweep(cfg: &ScenarioConfig) -> SweepResult {
    let specs = expand(cfg);
    let points = specs.par_iter().map(|s| evaluate(cfg, s)).collect();
    SweepResult { axes: cfg.sweep.iter().map(|a| a.variable.clone()).collect(), points }
}

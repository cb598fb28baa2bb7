//! Command implementations shared by the binary and the tests.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde_json::{json, Value};
use sqzc_core::fock::{cavity2_state, min_variance_fock, moments, read_state, wigner, write_state, GridSpec, Layout, Subsystem};
use sqzc_core::gaussian::{optimum_detuning, squeezing_db};

use crate::config::{OutputFormat, ScenarioConfig};
use crate::emit::svg::{sweep_plots, wigner_svg};
use crate::emit::table::{distribution_csv, sweep_csv, wigner_csv, write_file, Columns};
use crate::error::CliError;
use crate::sweep::{expand, point_state, run_sweep, SweepResult};

pub const THREADS_ENV: &str = "SQZC_THREADS";

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ScenarioConfig::from_json(&text)
}

/// Sizes the global worker pool; `SQZC_THREADS` takes precedence over the
/// command-line value.
pub fn configure_threads(cli: Option<usize>) -> Result<(), CliError> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?),
        Err(_) => None,
    };
    let Some(n) = env.or(cli) else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        warn!("worker pool already initialized; ignoring thread count {n}");
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub result: SweepResult,
    pub files: Vec<PathBuf>,
    /// `series #index: kind: message` for every failed point.
    pub failures: Vec<String>,
}

impl RunReport {
    /// `Err` with exit status 3 when any point failed.
    pub fn status(&self) -> Result<(), CliError> {
        if self.failures.is_empty() {
            return Ok(());
        }
        Err(CliError::PointsFailed(format!("{} of {} points failed: {}", self.failures.len(), self.result.points.len(), self.failures.join("; "))))
    }
}

pub fn columns(cfg: &ScenarioConfig) -> Columns {
    Columns { gaussian: cfg.solver.tier.gaussian(), fock: cfg.solver.tier.fock(), truncation: cfg.analysis.truncation_report }
}

/// Writes every artifact of a finished sweep into `dir`.
pub fn write_outputs(cfg: &ScenarioConfig, result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let name = &cfg.output.name;
    let csv = cfg.output.formats.contains(&OutputFormat::Csv);
    let svg = cfg.output.formats.contains(&OutputFormat::Svg);
    let mut files = Vec::new();
    let mut emit = |file: String, bytes: &[u8]| -> Result<(), CliError> {
        let path = dir.join(file);
        write_file(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    if csv {
        emit(format!("{name}.csv"), &sweep_csv(result, columns(cfg)))?;
    }
    if svg {
        for (suffix, doc) in sweep_plots(result, cfg.output.plot, cfg.output.reference_line, name)? {
            emit(format!("{name}{suffix}.svg"), doc.as_bytes())?;
        }
    }
    for p in &result.points {
        let stem = format!("{name}_{}_{}", p.spec.series, p.spec.index);
        if let Some(w) = &p.wigner {
            if csv {
                emit(format!("{stem}_wigner.csv"), &wigner_csv(w))?;
            }
            if svg {
                emit(format!("{stem}_wigner.svg"), wigner_svg(&format!("{name}: {} #{}", p.spec.series, p.spec.index), w).as_bytes())?;
            }
        }
        if let Some((sim, ideal)) = &p.distribution {
            emit(format!("{stem}_pn.csv"), &distribution_csv(sim, ideal))?;
        }
    }
    Ok(files)
}

pub fn run_scenario(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunReport, CliError> {
    let dir = out_dir.map_or_else(|| cfg.output.path.clone(), Path::to_path_buf);
    info!("running {} points", expand(cfg).len());
    let result = run_sweep(cfg);
    let files = write_outputs(cfg, &result, &dir)?;
    let failures = result
        .points
        .iter()
        .flat_map(|p| p.failures().map(move |f| format!("{} #{}: {}: {}", p.spec.series, p.spec.index, f.kind, f.message)))
        .collect();
    Ok(RunReport { result, files, failures })
}

fn single_point(cfg: &ScenarioConfig) -> Result<crate::sweep::PointSpec, CliError> {
    let mut specs = expand(cfg);
    if specs.len() != 1 {
        return Err(CliError::Config(format!("expected a single-point configuration, found {} points", specs.len())));
    }
    Ok(specs.remove(0))
}

/// Solves the steady state of a single-point configuration and stores it.
pub fn fock_steady(cfg: &ScenarioConfig, state_out: &Path) -> Result<Value, CliError> {
    let spec = single_point(cfg)?;
    let (state, params) = point_state(cfg, &spec).map_err(|f| CliError::PointsFailed(format!("{}: {}", f.kind, f.message)))?;
    write_state(state_out, &state.rho, Some(&params), Some(spec.hamiltonian)).map_err(|e| CliError::from(e).classify())?;
    let rho2 = cavity2_state(&state.rho)?;
    let (theta_min, var_min) = min_variance_fock(&rho2)?;
    Ok(json!({
        "state": state_out,
        "dim": state.rho.dim(),
        "delta12": params.delta12,
        "var_min": var_min,
        "theta_min": theta_min,
        "n_bar": moments(&rho2)?.n_bar,
        "residual": state.residual,
        "method": state.method,
        "iterations": state.iterations,
    }))
}

/// Wigner function of cavity 2 of a stored state on `[-xmax, xmax]^2`.
pub fn fock_wigner(state: &Path, xmax: f64, points: usize, out: &Path, svg: Option<&Path>) -> Result<Value, CliError> {
    let (rho, _) = read_state(state).map_err(|e| CliError::from(e).classify())?;
    let rho2 = match rho.layout {
        Layout::Full { .. } => cavity2_state(&rho)?,
        Layout::Reduced { subsystem: Subsystem::Cavity2, .. } => rho,
        Layout::Reduced { subsystem, .. } => return Err(CliError::Config(format!("state holds {subsystem:?}, not cavity 2"))),
    };
    let grid = GridSpec { x_range: (-xmax, xmax), p_range: (-xmax, xmax), nx: points, np: points };
    grid.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let w = wigner(&rho2, &grid)?;
    write_file(out, &wigner_csv(&w))?;
    if let Some(path) = svg {
        write_file(path, wigner_svg("Wigner function", &w).as_bytes())?;
    }
    Ok(json!({ "out": out, "normalization": w.normalization(), "boundary_max": w.boundary_max() }))
}

/// Gaussian-tier detuning optimum at one pump strength; `eps1` and `window`
/// are in the configuration's units.
pub fn gaussian_optimum(cfg: &ScenarioConfig, eps1: f64, window: (f64, f64)) -> Result<Value, CliError> {
    let scale = cfg.kappa2_mhz.map_or(1.0, |k| 1.0 / k);
    let p = cfg.normalized_circuit().with_eps1(eps1 * scale);
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let window = (window.0 * scale, window.1 * scale);
    if !(window.0 < window.1) {
        return Err(CliError::Config(format!("empty detuning window {window:?}")));
    }
    let opt = optimum_detuning(&p, p.eps1_mag, window, &cfg.solver.gaussian_options(None)).map_err(|e| CliError::from(e).classify())?;
    let (theta_min, var_min) = opt.solution.min_variance();
    Ok(json!({
        "eps1": p.eps1_mag,
        "delta12": opt.delta12,
        "delta12_effective": opt.solution.effective_detuning,
        "var_min": var_min,
        "theta_min": theta_min,
        "squeezing_db": squeezing_db(var_min),
        "n_bar": opt.solution.n_bar(),
    }))
}

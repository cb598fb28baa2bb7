//! CSV tables.

use std::fs;
use std::path::Path;

use sqzc_core::fock::WignerGrid;

use crate::error::CliError;
use crate::sweep::{FockRecord, GaussianRecord, PointFailure, PointResult, SweepResult};

/// Floats with 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

fn write_rows(header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Which column groups a sweep table carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Columns {
    pub gaussian: bool,
    pub fock: bool,
    pub truncation: bool,
}

const GAUSSIAN_COLUMNS: [&str; 16] = [
    "g_status",
    "g_error",
    "g_delta12",
    "g_delta12_effective",
    "g_var_min",
    "g_theta_min",
    "g_var_p",
    "g_squeezing_db",
    "g_n_bar",
    "g_eps_re",
    "g_eps_im",
    "g_iterations",
    "g_residual",
    "g_amplifier_unstable",
    "g_cavity_unstable",
    "g_stable",
];

const FOCK_COLUMNS: [&str; 16] = [
    "f_status",
    "f_error",
    "f_delta12",
    "f_var_min",
    "f_theta_min",
    "f_var_p",
    "f_squeezing_db",
    "f_n_bar",
    "f_aa_re",
    "f_aa_im",
    "f_mean_abs",
    "f_moment_error",
    "f_residual",
    "f_iterations",
    "f_method",
    "f_dim",
];

const TRUNCATION_COLUMNS: [&str; 7] =
    ["t_n2_reduced", "t_n_bar_reduced", "t_var_min_reduced", "t_tail_mass", "t_n_bar_shift", "t_var_min_shift", "t_unconverged"];

fn status<T>(r: &Result<T, PointFailure>) -> [String; 2] {
    match r {
        Ok(_) => ["ok".into(), String::new()],
        Err(e) => [e.kind.into(), e.message.clone()],
    }
}

fn gaussian_cells(r: &Result<GaussianRecord, PointFailure>) -> Vec<String> {
    let mut row = status(r).to_vec();
    match r {
        Ok(g) => row.extend([
            num(g.delta12),
            num(g.delta12_effective),
            num(g.var_min),
            num(g.theta_min),
            num(g.var_p),
            num(g.squeezing_db),
            num(g.n_bar),
            num(g.eps_converged.re),
            num(g.eps_converged.im),
            g.iterations.to_string(),
            num(g.residual),
            flag(g.amplifier_unstable),
            flag(g.cavity_unstable),
            flag(!g.amplifier_unstable && !g.cavity_unstable),
        ]),
        Err(_) => row.resize(GAUSSIAN_COLUMNS.len(), String::new()),
    }
    row
}

fn fock_cells(r: &Result<FockRecord, PointFailure>, dim: usize) -> Vec<String> {
    let mut row = status(r).to_vec();
    match r {
        Ok(f) => row.extend([
            num(f.delta12),
            num(f.var_min),
            num(f.theta_min),
            num(f.var_p),
            num(f.squeezing_db),
            num(f.n_bar),
            num(f.aa.re),
            num(f.aa.im),
            num(f.mean_abs),
            if f.moment_error_undefined { String::new() } else { num(f.moment_error) },
            num(f.residual),
            f.iterations.to_string(),
            serde_json::to_value(f.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            dim.to_string(),
        ]),
        Err(_) => row.resize(FOCK_COLUMNS.len(), String::new()),
    }
    row
}

fn truncation_cells(r: &Result<FockRecord, PointFailure>) -> Vec<String> {
    match r.as_ref().ok().and_then(|f| f.truncation.as_ref()) {
        Some(t) => vec![
            t.reduced.n2.to_string(),
            num(t.reduced.n_bar),
            num(t.reduced.var_min),
            num(t.reference.tail_mass),
            num(t.n_bar_shift),
            num(t.var_min_shift),
            flag(t.unconverged),
        ],
        None => vec![String::new(); TRUNCATION_COLUMNS.len()],
    }
}

/// Column names of a sweep table.
pub fn sweep_header(axes: &[String], cols: Columns) -> Vec<String> {
    let mut h: Vec<String> = ["series", "index"].iter().map(|s| s.to_string()).collect();
    h.extend(axes.iter().cloned());
    if cols.gaussian {
        h.extend(GAUSSIAN_COLUMNS.iter().map(|s| s.to_string()));
    }
    if cols.fock {
        h.extend(FOCK_COLUMNS.iter().map(|s| s.to_string()));
    }
    if cols.fock && cols.truncation {
        h.extend(TRUNCATION_COLUMNS.iter().map(|s| s.to_string()));
    }
    h
}

fn sweep_row(p: &PointResult, cols: Columns) -> Vec<String> {
    let mut row = vec![p.spec.series.clone(), p.spec.index.to_string()];
    row.extend(p.spec.coords.iter().map(|&c| num(c)));
    if cols.gaussian {
        match &p.gaussian {
            Some(g) => row.extend(gaussian_cells(g)),
            None => row.extend(vec![String::new(); GAUSSIAN_COLUMNS.len()]),
        }
    }
    if cols.fock {
        let dim = p.spec.truncation.dim();
        match &p.fock {
            Some(f) => {
                row.extend(fock_cells(f, dim));
                if cols.truncation {
                    row.extend(truncation_cells(f));
                }
            }
            None => {
                let n = FOCK_COLUMNS.len() + if cols.truncation { TRUNCATION_COLUMNS.len() } else { 0 };
                row.extend(vec![String::new(); n]);
            }
        }
    }
    row
}

/// One row per point in grid order, after a header row.
pub fn sweep_csv(result: &SweepResult, cols: Columns) -> Vec<u8> {
    let rows: Vec<Vec<String>> = result.points.iter().map(|p| sweep_row(p, cols)).collect();
    write_rows(&sweep_header(&result.axes, cols), &rows)
}

/// `(x, p, w)` triples, `p` varying fastest.
pub fn wigner_csv(w: &WignerGrid) -> Vec<u8> {
    let header = ["x", "p", "w"].map(String::from);
    let mut rows = Vec::with_capacity(w.nx * w.np);
    for i in 0..w.nx {
        for j in 0..w.np {
            rows.push(vec![num(w.x(i)), num(w.p(j)), num(w.values[j][i])]);
        }
    }
    write_rows(&header, &rows)
}

pub fn distribution_csv(simulated: &[f64], ideal: &[f64]) -> Vec<u8> {
    let header = ["N", "p_simulated", "p_ideal_squeezed"].map(String::from);
    let rows: Vec<Vec<String>> = simulated.iter().zip(ideal).enumerate().map(|(n, (s, i))| vec![n.to_string(), num(*s), num(*i)]).collect();
    write_rows(&header, &rows)
}

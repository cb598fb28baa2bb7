//! Single-mode observables: moments, quadratures, photon statistics,
//! Wigner functions and truncation checks.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::HamiltonianVariant;
use super::space::{HilbertConfig, Subsystem};
use super::state::{partial_trace, DensityMatrix, Layout};
use super::steady::{solve_steady, SteadyOptions, SteadyState};
use crate::effective::{factorized_fourth_moment, CircuitParams, HartreeState};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Exact moments below this make the moment error undefined.
pub const MOMENT_ERROR_FLOOR: f64 = 1e-12;
/// Relative shift above which a truncation is reported as unconverged.
pub const TRUNCATION_SHIFT_TOLERANCE: f64 = 0.01;
/// Wigner values above this on the grid boundary trigger a warning.
pub const WIGNER_BOUNDARY_TOLERANCE: f64 = 1e-4;

fn cavity_levels(rho: &DensityMatrix) -> Result<usize> {
    match rho.layout {
        Layout::Reduced { subsystem: Subsystem::Cavity1 | Subsystem::Cavity2, levels } => Ok(levels),
        _ => Err(Error::ConfigMismatch("expected a reduced single-cavity state".into())),
    }
}

/// Reduced state of cavity 2.
pub fn cavity2_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    partial_trace(rho, Subsystem::Cavity2)
}

/// Pure squeezed vacuum `S(r e^{i phi})|0>` truncated to `levels`, with
/// `<aa> = -e^{i phi} sinh r cosh r`.
pub fn squeezed_vacuum(r: f64, phi: f64, levels: usize) -> Result<DensityMatrix> {
    let mut psi = vec![ZERO; levels];
    let t = -Complex64::from_polar(r.tanh(), phi);
    let mut amp = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0;
    while 2 * n < levels {
        psi[2 * n] = amp;
        n += 1;
        let k = n as f64;
        // sqrt((2n)!)/(2^n n!) ratio between consecutive terms.
        amp *= t * ((2.0 * k - 1.0) * (2.0 * k)).sqrt() / (2.0 * k);
    }
    DensityMatrix::pure(Layout::Reduced { subsystem: Subsystem::Cavity2, levels }, &psi)
}

/// Fock state `|n>` of a single mode.
pub fn fock_state(n: usize, levels: usize) -> DensityMatrix {
    DensityMatrix::basis_state(Layout::Reduced { subsystem: Subsystem::Cavity2, levels }, n)
}

/// Raw moments of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeMoments {
    pub mean: Complex64,
    /// `<a^dag a>`.
    pub n_bar: f64,
    /// `<a a>`.
    pub aa: Complex64,
    /// `<a^dag a a^dag a>`.
    pub n_squared: f64,
}

impl ModeMoments {
    /// `<a^dag a> - |<a>|^2`.
    pub fn centered_n(&self) -> f64 {
        self.n_bar - self.mean.norm_sqr()
    }

    /// `<a a> - <a>^2`.
    pub fn centered_aa(&self) -> Complex64 {
        self.aa - self.mean * self.mean
    }
}

pub fn moments(rho: &DensityMatrix) -> Result<ModeMoments> {
    let n = cavity_levels(rho)?;
    let m = &rho.matrix;
    let mut mean = ZERO;
    let mut aa = ZERO;
    let mut n_bar = 0.0;
    let mut n_squared = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let p = m[(k, k)].re;
        n_bar += kf * p;
        n_squared += kf * kf * p;
        if k >= 1 {
            mean += kf.sqrt() * m[(k, k - 1)];
        }
        if k >= 2 {
            aa += (kf * (kf - 1.0)).sqrt() * m[(k, k - 2)];
        }
    }
    Ok(ModeMoments { mean, n_bar, aa, n_squared })
}

/// `Var(X_theta)` with `X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt 2`.
pub fn quadrature_variance_fock(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    let m = moments(rho)?;
    Ok(m.centered_n() + (Complex64::from_polar(1.0, -2.0 * theta) * m.centered_aa()).re + 0.5)
}

/// Minimal quadrature variance and its angle in `[0, pi)`.
pub fn min_variance_fock(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let m = moments(rho)?;
    let aa = m.centered_aa();
    let var = m.centered_n() - aa.norm() + 0.5;
    if aa.norm() == 0.0 {
        return Ok((0.0, var));
    }
    Ok(((aa.arg() / 2.0 + PI / 2.0).rem_euclid(PI), var))
}

pub fn number_distribution(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let n = cavity_levels(rho)?;
    Ok((0..n).map(|k| rho.matrix[(k, k)].re).collect())
}

/// `P(N)` of an ideal squeezed vacuum with mean photon number `n_bar`,
/// for `N < levels`.
pub fn ideal_squeezed_distribution(n_bar: f64, levels: usize) -> Vec<f64> {
    let r = n_bar.max(0.0).sqrt().asinh();
    let t2 = r.tanh().powi(2);
    let mut p = vec![0.0; levels];
    let mut v = 1.0 / r.cosh();
    let mut n = 0;
    while 2 * n < levels {
        p[2 * n] = v;
        n += 1;
        let k = n as f64;
        v *= t2 * (2.0 * k - 1.0) / (2.0 * k);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentError {
    /// Percentage error; 0 when `undefined`.
    pub percent: f64,
    pub exact: f64,
    pub factorized: f64,
    /// Set when the exact moment is below `MOMENT_ERROR_FLOOR`.
    pub undefined: bool,
}

/// Percentage error of the factorized `<a^dag a a^dag a>` against the exact
/// value.
pub fn moment_error(rho: &DensityMatrix) -> Result<MomentError> {
    let m = moments(rho)?;
    let factorized = factorized_fourth_moment(&HartreeState { n_bar: m.n_bar, aa: m.aa });
    let exact = m.n_squared;
    if exact < MOMENT_ERROR_FLOOR {
        return Ok(MomentError { percent: 0.0, exact, factorized, undefined: true });
    }
    Ok(MomentError { percent: 100.0 * (exact - factorized).abs() / exact, exact, factorized, undefined: false })
}

/// Grid specification for Wigner evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nx: usize,
    pub np: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_range: (-4.0, 4.0), p_range: (-4.0, 4.0), nx: 201, np: 201 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 || !(self.x_range.0 < self.x_range.1) || !(self.p_range.0 < self.p_range.1) {
            return Err(Error::InvalidParameter(format!("invalid Wigner grid {self:?}")));
        }
        Ok(())
    }
}

/// Wigner function sampled at `alpha = (x + i p) / sqrt 2`, normalized so
/// that `int W d^2 alpha = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nx: usize,
    pub np: usize,
    /// `values[j][i]` at `(x_i, p_j)`.
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_range.1 - self.p_range.0) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_range.0 + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_range.0 + j as f64 * self.dp()
    }

    /// Area of one cell in the `alpha` plane.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dp() / 2.0
    }

    pub fn normalization(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.cell_area()
    }

    pub fn boundary_max(&self) -> f64 {
        let (nx, np) = (self.nx, self.np);
        let mut m = 0.0f64;
        for (j, row) in self.values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if i == 0 || j == 0 || i == nx - 1 || j == np - 1 {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }

    /// Variance of the marginal distribution of `x` (`along_x`) or `p`.
    pub fn marginal_variance(&self, along_x: bool) -> f64 {
        let (n, coord): (usize, Box<dyn Fn(usize) -> f64>) =
            if along_x { (self.nx, Box::new(|i| self.x(i))) } else { (self.np, Box::new(|j| self.p(j))) };
        let weight = |k: usize| -> f64 {
            if along_x {
                self.values.iter().map(|row| row[k]).sum()
            } else {
                self.values[k].iter().sum()
            }
        };
        let w: Vec<f64> = (0..n).map(weight).collect();
        let total: f64 = w.iter().sum();
        let mean = (0..n).map(|k| coord(k) * w[k]).sum::<f64>() / total;
        (0..n).map(|k| (coord(k) - mean).powi(2) * w[k]).sum::<f64>() / total
    }
}

/// Wigner function at one point via the Laguerre recursion over the
/// density-matrix entries.
fn wigner_point(m: &DenseMatrix, alpha: Complex64, w: &mut [Complex64]) -> f64 {
    let n = m.rows();
    let two_a = alpha * 2.0;
    let two_ac = alpha.conj() * 2.0;
    w[0] = Complex64::new((-2.0 * alpha.norm_sqr()).exp() / PI, 0.0);
    let mut total = m[(0, 0)].re * w[0].re;
    for k in 1..n {
        w[k] = two_a * w[k - 1] / (k as f64).sqrt();
        total += 2.0 * (m[(0, k)] * w[k]).re;
    }
    for r in 1..n {
        let sr = (r as f64).sqrt();
        let mut temp = w[r];
        w[r] = (two_ac * temp - sr * w[r - 1]) / sr;
        total += (m[(r, r)] * w[r]).re;
        for k in r + 1..n {
            let next = (two_a * w[k - 1] - sr * temp) / (k as f64).sqrt();
            temp = w[k];
            w[k] = next;
            total += 2.0 * (m[(r, k)] * w[k]).re;
        }
    }
    2.0 * total
}

pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    let n = cavity_levels(rho)?;
    grid.validate()?;
    let mut g = WignerGrid { x_range: grid.x_range, p_range: grid.p_range, nx: grid.nx, np: grid.np, values: Vec::with_capacity(grid.np) };
    let mut scratch = vec![ZERO; n];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..grid.np {
        let p = g.p(j);
        let row = (0..grid.nx).map(|i| wigner_point(&rho.matrix, Complex64::new(g.x(i) * s, p * s), &mut scratch)).collect();
        g.values.push(row);
    }
    let edge = g.boundary_max();
    if edge > WIGNER_BOUNDARY_TOLERANCE {
        warn!("Wigner grid may be too small: |W| = {edge:e} on the boundary");
    }
    Ok(g)
}

/// Observables compared between two truncations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationObservables {
    pub n2: usize,
    pub n_bar: f64,
    pub var_min: f64,
    /// Probability in the top `max(2, n2 / 10)` Fock levels of cavity 2.
    pub tail_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationReport {
    pub reference: TruncationObservables,
    pub reduced: TruncationObservables,
    pub n_bar_shift: f64,
    pub var_min_shift: f64,
    pub unconverged: bool,
}

pub fn truncation_observables(state: &SteadyState) -> Result<TruncationObservables> {
    let rho2 = cavity2_state(&state.rho)?;
    let p = number_distribution(&rho2)?;
    let n2 = p.len();
    let top = (n2 / 10).max(2).min(n2);
    Ok(TruncationObservables {
        n2,
        n_bar: moments(&rho2)?.n_bar,
        var_min: min_variance_fock(&rho2)?.1,
        tail_mass: p[n2 - top..].iter().sum(),
    })
}

/// Observables smaller than this are compared absolutely.
const SHIFT_FLOOR: f64 = 1e-8;

fn relative_shift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(SHIFT_FLOOR)
}

/// Compares a computed steady state against a recomputation at `n2 - 10`.
pub fn truncation_report_from(state: &SteadyState, params: &CircuitParams, variant: HamiltonianVariant, opts: &SteadyOptions) -> Result<TruncationReport> {
    let config = state.rho.config().ok_or_else(|| Error::ConfigMismatch("truncation report needs a full-space state".into()))?;
    if config.n2 < 12 {
        return Err(Error::InvalidParameter(format!("n2 = {} leaves no room for a reduced truncation", config.n2)));
    }
    let reduced_cfg = HilbertConfig { n2: config.n2 - 10, ..config };
    let reduced = truncation_observables(&solve_steady(params, &reduced_cfg, variant, opts, None)?)?;
    let reference = truncation_observables(state)?;
    let n_bar_shift = relative_shift(reference.n_bar, reduced.n_bar);
    let var_min_shift = relative_shift(reference.var_min, reduced.var_min);
    Ok(TruncationReport {
        reference,
        reduced,
        n_bar_shift,
        var_min_shift,
        unconverged: n_bar_shift > TRUNCATION_SHIFT_TOLERANCE || var_min_shift > TRUNCATION_SHIFT_TOLERANCE,
    })
}

pub fn truncation_report(params: &CircuitParams, config: &HilbertConfig, variant: HamiltonianVariant, opts: &SteadyOptions) -> Result<TruncationReport> {
    let state = solve_steady(params, config, variant, opts, None)?;
    truncation_report_from(&state, params, variant, opts)
}

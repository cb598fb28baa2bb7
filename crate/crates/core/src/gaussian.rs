//! Gaussian mean-field tier: drift and diffusion of the complex-P
//! Fokker-Planck equation, steady covariances, quadratures, stability and the
//! self-consistent Hartree iteration.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::effective::{effective_detuning, hartree_drive, reduce, CircuitParams, EffectiveParams, HartreeState};
use crate::error::{Error, Result, Threshold};
use crate::numerics::{eigenvalues, solve_lyapunov, DenseMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Drift `A` and (diagonal) diffusion `D` over `(a1, a1+, a2, a2+)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub a: DenseMatrix,
    pub d: DenseMatrix,
}

pub fn build_drift_diffusion(eps1: Complex64, eps: Complex64, delta: f64, kappa1: f64, kappa: f64) -> DriftDiffusion {
    let i = Complex64::new(0.0, 1.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let cascade = r(-(kappa1 * kappa).sqrt());
    let a = DenseMatrix::from_rows(&[
        [r(-kappa1 / 2.0), eps1, ZERO, ZERO],
        [eps1.conj(), r(-kappa1 / 2.0), ZERO, ZERO],
        [cascade, ZERO, r(-kappa / 2.0) - i * delta, eps],
        [ZERO, cascade, eps.conj(), r(-kappa / 2.0) + i * delta],
    ]);
    let d = DenseMatrix::diag(&[eps1, eps1.conj(), eps, eps.conj()]);
    DriftDiffusion { a, d }
}

/// Which cavity a moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 2,
        }
    }
}

/// Normal-ordered second moments: `V[0][0] = <a1 a1>`, `V[0][1] = <a1+ a1>`,
/// `V[2][2] = <a2 a2>`, `V[2][3] = <a2+ a2>`, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix(pub DenseMatrix);

impl MomentMatrix {
    pub fn zeros() -> Self {
        Self(DenseMatrix::zeros(4, 4))
    }

    pub fn aa(&self, mode: Mode) -> Complex64 {
        let k = mode.offset();
        self.0[(k, k)]
    }

    pub fn n_bar(&self, mode: Mode) -> f64 {
        let k = mode.offset();
        self.0[(k, k + 1)].re
    }

    pub fn hartree_state(&self, mode: Mode) -> HartreeState {
        HartreeState { n_bar: self.n_bar(mode), aa: self.aa(mode) }
    }

    /// Largest violation of the symmetry, reality and conjugation pairings.
    pub fn invariant_error(&self) -> f64 {
        let v = &self.0;
        let mut err = v.max_abs_diff(&v.transpose());
        for k in [0, 2] {
            err = err.max(v[(k, k + 1)].im.abs());
            err = err.max((-v[(k, k + 1)].re).max(0.0));
            err = err.max((v[(k + 1, k + 1)] - v[(k, k)].conj()).norm());
        }
        err
    }
}

/// Eigenvalues of `A` together with the block-wise stability verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub amplifier_max_real: f64,
    pub cavity_max_real: f64,
    pub amplifier_unstable: bool,
    pub cavity_unstable: bool,
}

/// `A` is block lower-triangular, so its spectrum is the union of the
/// amplifier and cavity blocks.
pub fn stability_eigenvalues(dd: &DriftDiffusion) -> Result<StabilityReport> {
    let block = |o: usize| DenseMatrix::from_fn(2, 2, |i, j| dd.a[(o + i, o + j)]);
    let amp = eigenvalues(&block(0))?;
    let cav = eigenvalues(&block(2))?;
    let max_re = |v: &[Complex64]| v.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
    let (amplifier_max_real, cavity_max_real) = (max_re(&amp), max_re(&cav));
    Ok(StabilityReport {
        eigenvalues: amp.into_iter().chain(cav).collect(),
        amplifier_max_real,
        cavity_max_real,
        amplifier_unstable: amplifier_max_real >= 0.0,
        cavity_unstable: cavity_max_real >= 0.0,
    })
}

pub fn steady_covariance(dd: &DriftDiffusion) -> Result<MomentMatrix> {
    let report = stability_eigenvalues(dd)?;
    if report.amplifier_unstable {
        return Err(Error::AboveThreshold { threshold: Threshold::ParametricAmplifier, max_real_part: report.amplifier_max_real });
    }
    if report.cavity_unstable {
        return Err(Error::AboveThreshold { threshold: Threshold::EffectiveCavity, max_real_part: report.cavity_max_real });
    }
    Ok(MomentMatrix(solve_lyapunov(&dd.a, &dd.d)?))
}

/// `Var(X_theta) = <a+a> + Re(e^{-2i theta} <aa>) + 1/2`; `theta = pi/2` is `P`.
pub fn quadrature_variance(v: &MomentMatrix, mode: Mode, theta: f64) -> f64 {
    v.n_bar(mode) + (Complex64::from_polar(1.0, -2.0 * theta) * v.aa(mode)).re + 0.5
}

/// The literal `-S33 - S44 + S34 + S43 + 1/2` expression for the `P`
/// quadrature, `2 (<a+a> - Re<aa>) + 1/2`. Kept for comparison only.
pub fn literal_p_variance(v: &MomentMatrix, mode: Mode) -> f64 {
    let k = mode.offset();
    let m = &v.0;
    (-m[(k, k)] - m[(k + 1, k + 1)] + m[(k, k + 1)] + m[(k + 1, k)]).re + 0.5
}

/// Minimal quadrature variance and its angle in `[0, pi)`.
pub fn min_variance(v: &MomentMatrix, mode: Mode) -> (f64, f64) {
    let aa = v.aa(mode);
    let var = v.n_bar(mode) - aa.norm() + 0.5;
    if aa.norm() == 0.0 {
        return (0.0, var);
    }
    let theta = (aa.arg() / 2.0 + PI / 2.0).rem_euclid(PI);
    (theta, var)
}

pub fn squeezing_db(var: f64) -> f64 {
    10.0 * (0.5 / var).log10()
}

/// How the cavity detuning entering `A` is determined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DetuningMode {
    /// From the bare `delta12`, updated with `<a2+ a2>` every sweep.
    SelfConsistent,
    /// Held at a given effective detuning.
    FixedEffective(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub detuning: DetuningMode,
}

impl Default for GaussianOptions {
    fn default() -> Self {
        Self { damping: 0.5, tolerance: 1e-10, max_iter: 500, detuning: DetuningMode::SelfConsistent }
    }
}

#[derive(Debug, Clone)]
pub struct GaussianSolution {
    pub params_in: CircuitParams,
    pub effective: EffectiveParams,
    pub eps_converged: Complex64,
    pub effective_detuning: f64,
    pub moments: MomentMatrix,
    pub iterations: usize,
    /// `|eps - hartree_drive(zeta, V33)|` at the returned moments.
    pub residual: f64,
    pub stability: StabilityReport,
}

impl GaussianSolution {
    pub fn min_variance(&self) -> (f64, f64) {
        min_variance(&self.moments, Mode::Two)
    }

    pub fn n_bar(&self) -> f64 {
        self.moments.n_bar(Mode::Two)
    }
}

fn drift_for(params: &CircuitParams, eff: &EffectiveParams, eps: Complex64, delta: f64) -> DriftDiffusion {
    build_drift_diffusion(params.eps1(), eps, delta, params.kappa1, eff.kappa2_tilde)
}

pub fn self_consistent_solve(params: &CircuitParams) -> Result<GaussianSolution> {
    self_consistent_solve_with(params, &GaussianOptions::default(), Complex64::new(0.0, 0.0))
}

/// Damped fixed-point iteration for `eps = -2 i zeta <a2 a2>`, starting at
/// `eps0`.
pub fn self_consistent_solve_with(params: &CircuitParams, opts: &GaussianOptions, eps0: Complex64) -> Result<GaussianSolution> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    let eff = reduce(params)?;
    let detuning = |n_bar: f64| match opts.detuning {
        DetuningMode::SelfConsistent => effective_detuning(params, &eff, n_bar),
        DetuningMode::FixedEffective(d) => d,
    };
    let mut eps = eps0;
    let mut n_bar = 0.0;
    let mut change = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let delta = detuning(n_bar);
        let v = steady_covariance(&drift_for(params, &eff, eps, delta))?;
        let target = hartree_drive(eff.zeta, &v.hartree_state(Mode::Two));
        let next = eps * (1.0 - opts.damping) + target * opts.damping;
        let next_n = v.n_bar(Mode::Two);
        change = (next - eps).norm();
        let delta_change = (detuning(next_n) - delta).abs();
        eps = next;
        n_bar = next_n;
        if change <= opts.tolerance * (1.0 + eps.norm()) && delta_change <= opts.tolerance * (1.0 + delta.abs()) {
            let delta = detuning(n_bar);
            let dd = drift_for(params, &eff, eps, delta);
            let moments = steady_covariance(&dd)?;
            let residual = (eps - hartree_drive(eff.zeta, &moments.hartree_state(Mode::Two))).norm();
            return Ok(GaussianSolution {
                params_in: *params,
                effective: eff,
                eps_converged: eps,
                effective_detuning: delta,
                moments,
                iterations: iter,
                residual,
                stability: stability_eigenvalues(&dd)?,
            });
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, last_eps: eps, change })
}

#[derive(Debug, Clone)]
pub struct DetuningOptimum {
    /// Bare `delta12` at the optimum.
    pub delta12: f64,
    pub var_min: f64,
    pub solution: GaussianSolution,
}

pub const DETUNING_SCAN_POINTS: usize = 101;
pub const DETUNING_TOLERANCE: f64 = 1e-4;

/// Golden-section minimization of `f` on `[lo, hi]` down to width `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes the cavity-2 `var_min` over the bare detuning `delta12` within
/// `window`, at amplifier drive `eps1`.
pub fn optimum_detuning(params: &CircuitParams, eps1: f64, window: (f64, f64), opts: &GaussianOptions) -> Result<DetuningOptimum> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("detuning window [{lo}, {hi}] is empty or not finite")));
    }
    let base = params.with_eps1(eps1);
    let opts = GaussianOptions { detuning: DetuningMode::SelfConsistent, ..*opts };
    let objective = |d: f64| match self_consistent_solve_with(&base.with_delta12(d), &opts, ZERO) {
        Ok(s) => s.min_variance().1,
        Err(_) => f64::INFINITY,
    };
    let n = DETUNING_SCAN_POINTS;
    let grid: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&d| objective(d)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    if best == 0 || best == n - 1 || !values[best].is_finite() {
        return Err(Error::NoBracket { lo, hi });
    }
    let d = golden_section(objective, grid[best - 1], grid[best + 1], DETUNING_TOLERANCE);
    let solution = self_consistent_solve_with(&base.with_delta12(d), &opts, ZERO)?;
    Ok(DetuningOptimum { delta12: d, var_min: solution.min_variance().1, solution })
}

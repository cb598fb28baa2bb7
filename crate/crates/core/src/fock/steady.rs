//! Steady states of the Lindblad generator.
//!
//! * `Direct` replaces one row of the sparse superoperator by the trace
//!   functional and factorizes it.
//! * `Krylov` runs GMRES on `L(X) + W tr(X) = W` (with `W = I/d`),
//!   preconditioned by the inverse of the coherent part in the Schur basis
//!   of `H_eff`.
//! * `Evolve` integrates the master equation until `L(rho)` is negligible.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use log::{debug, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{build_collapse, build_hamiltonian, HamiltonianVariant};
use super::liouvillian::{build_liouvillian, Liouvillian};
use super::space::HilbertConfig;
use super::state::{DensityMatrix, Layout, StateDiagnostics, POSITIVITY_TOLERANCE};
use crate::effective::CircuitParams;
use crate::error::{Error, Result};
use crate::numerics::{complex_schur, gmres, solve_sparse, DenseMatrix, DormandPrince, GmresOptions, OdeOptions, ShiftedSylvester, SparseMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyMethod {
    /// `Direct` for `d <= auto_direct_max_dim`, otherwise `Krylov`.
    #[default]
    Auto,
    Direct,
    Krylov,
    Evolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyOptions {
    pub method: SteadyMethod,
    /// Accept when `||L(rho)||_F <= residual_tolerance * ||rho||_F`.
    pub residual_tolerance: f64,
    /// Largest superoperator dimension `d^2` the direct method may factor.
    pub direct_cap: usize,
    pub auto_direct_max_dim: usize,
    /// Real shift of the Krylov preconditioner.
    pub shift: f64,
    pub krylov_rtol: f64,
    pub krylov_max_iter: usize,
    pub evolve_t_max: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            method: SteadyMethod::Auto,
            residual_tolerance: 1e-8,
            direct_cap: 90_000,
            auto_direct_max_dim: 64,
            shift: 1e-6,
            krylov_rtol: 1e-11,
            krylov_max_iter: 5000,
            evolve_t_max: 1e5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `||L(rho)||_F / ||rho||_F` of the returned state.
    pub residual: f64,
    pub method: SteadyMethod,
    /// GMRES iterations or accepted ODE steps; 1 for the direct method.
    pub iterations: usize,
    pub diagnostics: StateDiagnostics,
}

fn frobenius(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||L(rho)||_F / ||rho||_F` for a row-major `rho`.
pub fn relative_residual(l: &Liouvillian, rho: &[Complex64]) -> f64 {
    let mut out = vec![ZERO; rho.len()];
    l.apply(rho, &mut out);
    frobenius(&out) / frobenius(rho)
}

fn finalize(l: &Liouvillian, rho: Vec<Complex64>, method: SteadyMethod, iterations: usize, opts: &SteadyOptions) -> Result<SteadyState> {
    let d = l.dim();
    let mut rho = DensityMatrix::new(Layout::Full { config: l.config }, DenseMatrix::from_row_major(d, d, rho)?)?;
    rho.hermitize();
    rho.normalize();
    let residual = relative_residual(l, rho.matrix.as_slice());
    if !residual.is_finite() || residual > opts.residual_tolerance {
        return Err(Error::ResidualTooLarge { residual, tolerance: opts.residual_tolerance });
    }
    let diagnostics = rho.diagnostics()?;
    if diagnostics.min_eigenvalue < -POSITIVITY_TOLERANCE {
        return Err(Error::NotPositive { min_eigenvalue: diagnostics.min_eigenvalue });
    }
    debug!("steady state via {method:?}: d = {d}, residual {residual:e}, {iterations} iterations");
    Ok(SteadyState { rho, residual, method, iterations, diagnostics })
}

fn check_initial(l: &Liouvillian, initial: Option<&DensityMatrix>) -> Result<()> {
    match initial {
        Some(r) if r.config() != Some(l.config) => Err(Error::ConfigMismatch("initial state lives on a different space".into())),
        _ => Ok(()),
    }
}

pub fn steady_state(l: &Liouvillian, opts: &SteadyOptions, initial: Option<&DensityMatrix>) -> Result<SteadyState> {
    check_initial(l, initial)?;
    let d = l.dim();
    let method = match opts.method {
        SteadyMethod::Auto if d <= opts.auto_direct_max_dim => SteadyMethod::Direct,
        SteadyMethod::Auto => SteadyMethod::Krylov,
        m => m,
    };
    match method {
        SteadyMethod::Direct => direct(l, opts),
        SteadyMethod::Krylov => krylov(l, opts, initial),
        SteadyMethod::Evolve => evolve(l, opts, initial),
        SteadyMethod::Auto => unreachable!(),
    }
}

/// Builds the model and solves for its steady state.
pub fn solve_steady(
    params: &CircuitParams,
    config: &HilbertConfig,
    variant: HamiltonianVariant,
    opts: &SteadyOptions,
    initial: Option<&DensityMatrix>,
) -> Result<SteadyState> {
    let h = build_hamiltonian(params, config, variant)?;
    let c = build_collapse(params, config, variant)?;
    steady_state(&build_liouvillian(&h, &c)?, opts, initial)
}

fn direct(l: &Liouvillian, opts: &SteadyOptions) -> Result<SteadyState> {
    let d = l.dim();
    let n = d * d;
    if n > opts.direct_cap {
        return Err(Error::MemoryBudget { required: n, cap: opts.direct_cap });
    }
    let sup = l.superoperator();
    let mut t: Vec<(usize, usize, Complex64)> = sup.triplets().filter(|&(i, _, _)| i != 0).collect();
    t.extend((0..d).map(|k| (0, k * d + k, ONE)));
    let m = SparseMatrix::from_triplets(n, t)?;
    let mut b = vec![ZERO; n];
    b[0] = ONE;
    let x = solve_sparse(&m, &b)?;
    finalize(l, x, SteadyMethod::Direct, 1, opts)
}

fn evolve(l: &Liouvillian, opts: &SteadyOptions, initial: Option<&DensityMatrix>) -> Result<SteadyState> {
    let d = l.dim();
    let y0 = match initial {
        Some(r) => r.matrix.as_slice().to_vec(),
        None => {
            let mut y = vec![ZERO; d * d];
            y[0] = ONE;
            y
        }
    };
    let ode = OdeOptions { rtol: 1e-10, atol: 1e-12, ..OdeOptions::default() };
    let mut stepper = DormandPrince::new(|_, y: &[Complex64], dy: &mut [Complex64]| l.apply(y, dy), 0.0, y0, ode);
    let t_max = opts.evolve_t_max;
    loop {
        let rate = frobenius(stepper.dy()) / frobenius(stepper.y());
        if rate <= opts.residual_tolerance * 0.5 {
            break;
        }
        if stepper.t() >= t_max {
            return Err(Error::ResidualTooLarge { residual: rate, tolerance: opts.residual_tolerance });
        }
        stepper.step(t_max, t_max)?;
    }
    let steps = stepper.steps();
    finalize(l, stepper.y().to_vec(), SteadyMethod::Evolve, steps, opts)
}

/// GMRES restart length that keeps the Krylov basis within about 1.5 GB.
pub fn krylov_restart(d: usize) -> usize {
    let per_vector = 16.0 * (d * d) as f64;
    ((1.5e9 / per_vector) as usize).clamp(20, 200)
}

fn to_faer(v: &[Complex64], d: usize) -> Mat<Complex64> {
    Mat::from_fn(d, d, |i, j| v[i + j * d])
}

fn from_faer(m: &Mat<Complex64>, out: &mut [Complex64]) {
    let d = m.nrows();
    for j in 0..d {
        for i in 0..d {
            out[i + j * d] = m[(i, j)];
        }
    }
}

/// `A B A^H` into a new matrix.
fn sandwich(a: &Mat<Complex64>, b: &Mat<Complex64>, tmp: &mut Mat<Complex64>) -> Mat<Complex64> {
    let d = a.nrows();
    matmul(tmp.as_mut(), Accum::Replace, a.as_ref(), b.as_ref(), ONE, Par::Seq);
    let mut out = Mat::zeros(d, d);
    matmul(out.as_mut(), Accum::Replace, tmp.as_ref(), a.adjoint(), ONE, Par::Seq);
    out
}

fn krylov(l: &Liouvillian, opts: &SteadyOptions, initial: Option<&DensityMatrix>) -> Result<SteadyState> {
    let d = l.dim();
    let h_eff = l.h_eff.to_dense().to_faer();
    let schur = complex_schur(h_eff.as_ref())?;
    let q = schur.q;
    let qh = q.adjoint().to_owned();
    let c_dense = l.c.to_dense().to_faer();
    let mut tmp = Mat::<Complex64>::zeros(d, d);
    let c_t = {
        let mut cq = Mat::zeros(d, d);
        matmul(cq.as_mut(), Accum::Replace, c_dense.as_ref(), q.as_ref(), ONE, Par::Seq);
        let mut out = Mat::zeros(d, d);
        matmul(out.as_mut(), Accum::Replace, qh.as_ref(), cq.as_ref(), ONE, Par::Seq);
        out
    };
    drop(c_dense);
    let sigma = opts.shift;
    let sylv = ShiftedSylvester::new(schur.t, Complex64::new(0.0, -sigma));
    let w = Complex64::new(1.0 / d as f64, 0.0);
    let i = Complex64::new(0.0, 1.0);

    // S^{-1}(Y): solve T Z - Z T^H - i sigma Z = i Y in place.
    let shifted_inverse = |y: &mut Mat<Complex64>| -> Result<()> {
        for j in 0..d {
            for k in 0..d {
                y[(k, j)] *= i;
            }
        }
        sylv.solve_in_place(y.as_mut())
    };

    let mut rhs_mat = Mat::<Complex64>::zeros(d, d);
    for k in 0..d {
        rhs_mat[(k, k)] = w;
    }
    shifted_inverse(&mut rhs_mat)?;
    let mut rhs = vec![ZERO; d * d];
    from_faer(&rhs_mat, &mut rhs);
    drop(rhs_mat);

    let mut x0 = initial.map(|r| {
        let rho = r.matrix.to_faer();
        let z = sandwich(&qh, &rho, &mut tmp);
        let mut v = vec![ZERO; d * d];
        from_faer(&z, &mut v);
        v
    });

    let apply = |v: &[Complex64], out: &mut [Complex64]| -> Result<()> {
        let z = to_faer(v, d);
        let mut tmp = Mat::<Complex64>::zeros(d, d);
        let mut y = sandwich(&c_t, &z, &mut tmp);
        let tr: Complex64 = (0..d).map(|k| z[(k, k)]).sum();
        for j in 0..d {
            for k in 0..d {
                y[(k, j)] += z[(k, j)] * sigma;
            }
            y[(j, j)] += w * tr;
        }
        shifted_inverse(&mut y)?;
        for j in 0..d {
            for k in 0..d {
                out[k + j * d] = v[k + j * d] + y[(k, j)];
            }
        }
        Ok(())
    };

    let mut gopts = GmresOptions { rtol: opts.krylov_rtol, restart: krylov_restart(d), max_iter: opts.krylov_max_iter };
    let mut iterations = 0;
    let mut apply = apply;
    let mut last_err = None;
    for attempt in 0..3 {
        let out = gmres(&mut apply, &rhs, x0.take(), gopts)?;
        iterations += out.iterations;
        let z = to_faer(&out.x, d);
        let rho = sandwich(&q, &z, &mut tmp);
        let rho_vec = DenseMatrix::from_faer(rho.as_ref()).into_vec();
        match finalize(l, rho_vec, SteadyMethod::Krylov, iterations, opts) {
            Ok(s) => return Ok(s),
            Err(e @ Error::ResidualTooLarge { .. }) => {
                warn!("Krylov attempt {attempt} missed the residual target ({e}); tightening");
                last_err = Some(e);
                x0 = Some(out.x);
                gopts.rtol *= 1e-2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran"))
}

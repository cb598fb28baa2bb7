//! Lindblad generator `L(rho) = -i[H, rho] + C rho C^dag - {C^dag C, rho}/2`.
//!
//! States are vectorized row-major, `vec(rho)[i d + j] = rho[i][j]`, so that
//! `vec(A X B) = (A ⊗ B^T) vec(X)`.

use num_complex::Complex64;

use super::space::{FockOperator, HilbertConfig};
use crate::error::{Error, Result};
use crate::numerics::SparseMatrix;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Hamiltonians more non-Hermitian than this are rejected.
pub const HAMILTONIAN_HERMITICITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub config: HilbertConfig,
    pub h: SparseMatrix,
    pub c: SparseMatrix,
    /// `H - (i/2) C^dag C`.
    pub h_eff: SparseMatrix,
    h_eff_adj: SparseMatrix,
    c_adj: SparseMatrix,
}

pub fn build_liouvillian(h: &FockOperator, collapse: &FockOperator) -> Result<Liouvillian> {
    if h.config != collapse.config {
        return Err(Error::ConfigMismatch("Hamiltonian and collapse operator live on different spaces".into()));
    }
    let herm = h.hermiticity_error();
    if herm > HAMILTONIAN_HERMITICITY_TOLERANCE {
        return Err(Error::InvalidParameter(format!("Hamiltonian is not Hermitian (error {herm:e})")));
    }
    let c_adj = collapse.matrix.adjoint();
    let h_eff = h.matrix.add_scaled(&c_adj.matmul(&collapse.matrix), Complex64::new(0.0, -0.5));
    Ok(Liouvillian {
        config: h.config,
        h: h.matrix.clone(),
        c: collapse.matrix.clone(),
        h_eff_adj: h_eff.adjoint(),
        h_eff,
        c_adj,
    })
}

/// `out += s * A X` for sparse `A` and row-major dense `X`.
fn sparse_left(a: &SparseMatrix, x: &[Complex64], s: Complex64, out: &mut [Complex64]) {
    let d = a.dim();
    for i in 0..d {
        let row = &mut out[i * d..(i + 1) * d];
        for (k, v) in a.row(i) {
            let f = s * v;
            row.iter_mut().zip(&x[k * d..(k + 1) * d]).for_each(|(o, xv)| *o += f * xv);
        }
    }
}

/// `out += s * X B` for row-major dense `X` and sparse `B`.
fn sparse_right(x: &[Complex64], b: &SparseMatrix, s: Complex64, out: &mut [Complex64]) {
    let d = b.dim();
    for i in 0..d {
        let xrow = &x[i * d..(i + 1) * d];
        let orow = &mut out[i * d..(i + 1) * d];
        for (k, &xv) in xrow.iter().enumerate() {
            if xv == ZERO {
                continue;
            }
            let f = s * xv;
            for (j, v) in b.row(k) {
                orow[j] += f * v;
            }
        }
    }
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    /// Writes `L(rho)` for a row-major `rho` into `out`.
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim();
        assert_eq!(rho.len(), d * d);
        assert_eq!(out.len(), d * d);
        out.iter_mut().for_each(|z| *z = ZERO);
        let i = Complex64::new(0.0, 1.0);
        sparse_left(&self.h_eff, rho, -i, out);
        sparse_right(rho, &self.h_eff_adj, i, out);
        let mut tmp = vec![ZERO; d * d];
        sparse_left(&self.c, rho, Complex64::new(1.0, 0.0), &mut tmp);
        sparse_right(&tmp, &self.c_adj, Complex64::new(1.0, 0.0), out);
    }

    /// Sparse `d^2 x d^2` superoperator.
    pub fn superoperator(&self) -> SparseMatrix {
        let d = self.dim();
        let id = SparseMatrix::identity(d);
        let i = Complex64::new(0.0, 1.0);
        let coherent = self.h_eff.kron(&id).scale(-i).add(&id.kron(&self.h_eff.conj()).scale(i));
        coherent.add(&self.c.kron(&self.c.conj()))
    }

    /// `max |vec(I)^T L|`, zero for a trace-preserving generator.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim();
        let mut t = vec![ZERO; d * d];
        for k in 0..d {
            t[k * d + k] = Complex64::new(1.0, 0.0);
        }
        self.superoperator().left_matvec(&t).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::space::{destroy, qubit_lower};
    use crate::numerics::{integrate_ode, OdeOptions};

    fn single_mode(n: usize) -> HilbertConfig {
        // A 1 x n x (no qubit) space behaves as a single mode; n1 = 2 kept
        // in its ground state.
        HilbertConfig::new(2, n, false).unwrap()
    }

    #[test]
    fn operator_form_matches_superoperator() {
        let cfg = HilbertConfig::new(2, 3, true).unwrap();
        let d = cfg.dim();
        let h = SparseMatrix::from_dense(&crate::numerics::DenseMatrix::from_fn(d, d, |i, j| {
            let v = Complex64::new(((i * 7 + j * 3) % 5) as f64, ((i + 2 * j) % 3) as f64 - 1.0);
            let w = Complex64::new(((j * 7 + i * 3) % 5) as f64, ((j + 2 * i) % 3) as f64 - 1.0);
            (v + w.conj()) * 0.5
        }))
        .unwrap();
        let c = SparseMatrix::from_triplets(d, (1..d).map(|k| (k - 1, k, Complex64::new(0.3 * k as f64, 0.1))).collect()).unwrap();
        let l = build_liouvillian(&FockOperator::new(cfg, h).unwrap(), &FockOperator::new(cfg, c).unwrap()).unwrap();
        let rho: Vec<Complex64> = (0..d * d).map(|k| Complex64::new((k % 7) as f64 - 3.0, (k % 4) as f64)).collect();
        let mut out = vec![ZERO; d * d];
        l.apply(&rho, &mut out);
        let reference = l.superoperator().matvec(&rho);
        for (a, b) in out.iter().zip(&reference) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(l.trace_preservation_error() < 1e-10);
    }

    #[test]
    fn damped_cavity_decay() {
        let cfg = single_mode(6);
        let d = cfg.dim();
        let a2 = crate::fock::space::embed(&cfg, 1, &destroy(6));
        let kappa: f64 = 0.7;
        let l = build_liouvillian(
            &FockOperator::new(cfg, SparseMatrix::zeros(d)).unwrap(),
            &FockOperator::new(cfg, a2.scale(Complex64::new(kappa.sqrt(), 0.0))).unwrap(),
        )
        .unwrap();
        let mut rho0 = vec![ZERO; d * d];
        let k3 = cfg.index(0, 3, 0);
        rho0[k3 * d + k3] = Complex64::new(1.0, 0.0);
        let t = 1.3;
        let y = integrate_ode(|_, y, dy| l.apply(y, dy), 0.0, t, rho0, OdeOptions::default()).unwrap();
        let n: f64 = (0..6).map(|n| n as f64 * y[cfg.index(0, n, 0) * d + cfg.index(0, n, 0)].re).sum();
        assert!((n - 3.0 * (-kappa * t).exp()).abs() < 1e-7);
    }

    #[test]
    fn two_level_decay() {
        let cfg = HilbertConfig::new(2, 2, true).unwrap();
        let d = cfg.dim();
        let sm = crate::fock::space::embed(&cfg, 2, &qubit_lower());
        let gamma: f64 = 1.7;
        let l = build_liouvillian(
            &FockOperator::new(cfg, SparseMatrix::zeros(d)).unwrap(),
            &FockOperator::new(cfg, sm.scale(Complex64::new(gamma.sqrt(), 0.0))).unwrap(),
        )
        .unwrap();
        let e = cfg.index(0, 0, 1);
        let mut rho0 = vec![ZERO; d * d];
        rho0[e * d + e] = Complex64::new(1.0, 0.0);
        let t = 0.9;
        let y = integrate_ode(|_, y, dy| l.apply(y, dy), 0.0, t, rho0, OdeOptions::default()).unwrap();
        assert!((y[e * d + e].re - (-gamma * t).exp()).abs() < 1e-7);
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected() {
        let cfg = HilbertConfig::new(2, 2, false).unwrap();
        let h = SparseMatrix::from_triplets(4, vec![(0, 1, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(build_liouvillian(&FockOperator::new(cfg, h).unwrap(), &FockOperator::new(cfg, SparseMatrix::zeros(4)).unwrap()).is_err());
    }
}

//! Direct linear solves.

use faer::prelude::Solve;
use faer::Mat;
use num_complex::Complex64;

use super::dense::DenseMatrix;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest matrix entry are
/// treated as exact zeros.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Residual bound `||Mx - b|| / ||b||` every returned solution satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// LU factorization with partial pivoting of a dense square matrix.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of a {}x{} matrix", m.rows(), m.cols())));
        }
        let n = m.rows();
        let threshold = PIVOT_THRESHOLD * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= threshold || pmag == 0.0 {
                return Err(Error::Singular { pivot: pmag, threshold });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..self.n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..self.n).rev() {
            for j in i + 1..self.n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

fn relative_residual(mx: &[Complex64], b: &[Complex64]) -> f64 {
    let r: f64 = mx.iter().zip(b).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nb == 0.0 {
        r
    } else {
        r / nb
    }
}

/// Solves `M x = b` for dense square `M`.
pub fn solve_dense(m: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!("rhs of length {} for {} rows", b.len(), m.rows())));
    }
    let x = DenseLu::new(m)?.solve(b);
    check_solution(&m.matvec(&x), b, &x)?;
    Ok(x)
}

/// Solves `M x = b` for sparse square `M` with a fill-reducing sparse LU.
pub fn solve_sparse(m: &SparseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if b.len() != m.dim() {
        return Err(Error::DimensionMismatch(format!("rhs of length {} for dimension {}", b.len(), m.dim())));
    }
    let threshold = PIVOT_THRESHOLD * m.max_abs();
    let csc = m.to_faer_csc()?;
    let lu = csc.sp_lu().map_err(|_| Error::Singular { pivot: 0.0, threshold })?;
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let sol = lu.solve(&rhs);
    let x: Vec<Complex64> = (0..b.len()).map(|i| sol[(i, 0)]).collect();
    check_solution(&m.matvec(&x), b, &x)?;
    Ok(x)
}

fn check_solution(mx: &[Complex64], b: &[Complex64], x: &[Complex64]) -> Result<()> {
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular { pivot: 0.0, threshold: PIVOT_THRESHOLD });
    }
    let res = relative_residual(mx, b);
    if res > RESIDUAL_TOLERANCE {
        return Err(Error::ResidualTooLarge { residual: res, tolerance: RESIDUAL_TOLERANCE });
    }
    Ok(())
}

/// Either storage flavour accepted by [`solve_linear`].
pub enum LinearSystem<'a> {
    Dense(&'a DenseMatrix),
    Sparse(&'a SparseMatrix),
}

pub fn solve_linear(m: LinearSystem<'_>, b: &[Complex64]) -> Result<Vec<Complex64>> {
    match m {
        LinearSystem::Dense(d) => solve_dense(d, b),
        LinearSystem::Sparse(s) => solve_sparse(s, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![Complex64::new(1.0, 2.0), c(-3.0), Complex64::new(0.0, 0.5)];
        let x = solve_dense(&DenseMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
        let xs = solve_sparse(&SparseMatrix::identity(3), &b).unwrap();
        for (u, v) in xs.iter().zip(&b) {
            assert!((u - v).norm() < 1e-15);
        }
    }

    #[test]
    fn diagonal_solve() {
        let m = DenseMatrix::diag(&[c(2.0), c(4.0)]);
        let x = solve_dense(&m, &[c(2.0), c(8.0)]).unwrap();
        assert!((x[0] - c(1.0)).norm() < 1e-15 && (x[1] - c(2.0)).norm() < 1e-15);
        let xs = solve_linear(LinearSystem::Sparse(&SparseMatrix::from_dense(&m).unwrap()), &[c(2.0), c(8.0)]).unwrap();
        assert!((xs[0] - c(1.0)).norm() < 1e-15 && (xs[1] - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn random_well_conditioned_system_has_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 16;
        let m = DenseMatrix::from_fn(n, n, |i, j| {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if i == j {
                z + c(n as f64)
            } else {
                z
            }
        });
        let b: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        for x in [solve_dense(&m, &b).unwrap(), solve_sparse(&SparseMatrix::from_dense(&m).unwrap(), &b).unwrap()] {
            // Multiplication oracle.
            let mx = m.matvec(&x);
            assert!(relative_residual(&mx, &b) < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = DenseMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(solve_dense(&m, &[c(1.0), c(1.0)]), Err(Error::Singular { .. })));
        let tiny = DenseMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 1e-16]]);
        assert!(matches!(solve_dense(&tiny, &[c(1.0), c(1.0)]), Err(Error::Singular { .. })));
    }
}

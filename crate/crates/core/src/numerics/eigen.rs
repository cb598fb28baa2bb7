//! Dense eigenvalue and Schur decompositions.

use faer::{Mat, Side};
use num_complex::Complex64;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::Eigen("non-finite matrix entries".into()));
    }
    m.to_faer().eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(m: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().fold(f64::NEG_INFINITY, |a, z| a.max(z.re)))
}

/// Ascending eigenvalues of a Hermitian matrix given as a faer matrix.
/// Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: faer::MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Complex Schur form `A = Q T Q^H` with `Q` unitary and `T` upper triangular.
pub struct Schur {
    pub q: Mat<Complex64>,
    pub t: Mat<Complex64>,
}

pub fn complex_schur(a: faer::MatRef<'_, Complex64>) -> Result<Schur> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("Schur form of a non-square matrix".into()));
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
    let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    Ok(Schur {
        q: Mat::from_fn(n, n, |i, j| q[(i, j)]),
        // Entries below the diagonal are rounding noise; drop them.
        t: Mat::from_fn(n, n, |i, j| if i > j { Complex64::new(0.0, 0.0) } else { t[(i, j)] }),
    })
}

//! Continuous Lyapunov equation `A V + V A^T + D = 0`.
//!
//! The drift matrices handled here are tiny (4x4), so the equation is solved
//! exactly by vectorizing it into an `n^2`-dimensional dense linear system.
//! Note the plain transpose: the phase-space variables of the complex
//! P-representation are not conjugates of each other in the equation.

use num_complex::Complex64;

use super::dense::DenseMatrix;
use super::eigen::spectral_abscissa;
use super::linsolve::DenseLu;
use crate::error::{Error, Result};

/// Bound on `max |A V + V A^T + D|` for every returned solution, relative
/// to `max(1, |A| |V|)` so that near-threshold (huge) covariances are not
/// held to an absolute bound below double precision.
pub const LYAPUNOV_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// `A V + V A^T + D`, the quantity that vanishes at the solution.
pub fn lyapunov_residual(a: &DenseMatrix, v: &DenseMatrix, d: &DenseMatrix) -> DenseMatrix {
    let av = a * v;
    let vat = v * &a.transpose();
    &(&av + &vat) + d
}

pub fn solve_lyapunov(a: &DenseMatrix, d: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if !a.is_square() || d.rows() != n || d.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Lyapunov with A {}x{} and D {}x{}",
            a.rows(),
            a.cols(),
            d.rows(),
            d.cols()
        )));
    }
    let abscissa = spectral_abscissa(a)?;
    if abscissa >= 0.0 {
        return Err(Error::UnstableDrift { max_real_part: abscissa });
    }

    // Row-major vec: vec(A V) = (A ⊗ I) vec V and vec(V A^T) = (I ⊗ A) vec V.
    let nn = n * n;
    let mut m = DenseMatrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                m[(row, k * n + j)] += a[(i, k)];
                m[(row, i * n + k)] += a[(j, k)];
            }
        }
    }
    let rhs: Vec<Complex64> = d.as_slice().iter().map(|z| -z).collect();
    let v = DenseLu::new(&m)?.solve(&rhs);
    let v = DenseMatrix::from_row_major(n, n, v)?;

    let residual = lyapunov_residual(a, &v, d).max_abs();
    let tolerance = LYAPUNOV_RESIDUAL_TOLERANCE * (a.max_abs() * v.max_abs()).max(1.0);
    if !(residual <= tolerance) {
        return Err(Error::ResidualTooLarge { residual, tolerance });
    }
    Ok(v)
}

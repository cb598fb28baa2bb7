//! Restarted GMRES for matrix-free complex linear operators.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    /// Stop when `||b - A x|| <= rtol * ||b||`.
    pub rtol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, restart: 60, max_iter: 2000 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

/// Solves `A x = b`, where `apply(v, out)` writes `A v` into `out`.
/// `x0` is the starting guess (zero when `None`).
pub fn gmres<F>(mut apply: F, b: &[Complex64], x0: Option<Vec<Complex64>>, opts: GmresOptions) -> Result<GmresOutcome>
where
    F: FnMut(&[Complex64], &mut [Complex64]) -> Result<()>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = x0.unwrap_or_else(|| vec![ZERO; n]);
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!("initial guess of length {} for system of size {n}", x.len())));
    }
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x: vec![ZERO; n], iterations: 0, relative_residual: 0.0 });
    }
    let m = opts.restart.max(1).min(n.max(1));
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    let mut w = vec![ZERO; n];
    let mut iterations = 0;
    let mut rel;
    loop {
        apply(&x, &mut w)?;
        let mut r: Vec<Complex64> = b.iter().zip(&w).map(|(bi, wi)| bi - wi).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= opts.rtol {
            return Ok(GmresOutcome { x, iterations, relative_residual: rel });
        }
        if iterations >= opts.max_iter {
            return Err(Error::KrylovNonConvergence { iterations, residual: rel });
        }
        r.iter_mut().for_each(|z| *z /= beta);
        basis.clear();
        basis.push(r);
        // Hessenberg columns, Givens rotations, and the rotated rhs.
        let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut cs: Vec<(f64, Complex64)> = Vec::with_capacity(m);
        let mut g = vec![Complex64::new(beta, 0.0)];
        let mut k = 0;
        while k < m && iterations < opts.max_iter {
            apply(&basis[k], &mut w)?;
            let mut col = vec![ZERO; k + 2];
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for _ in 0..2 {
                for (j, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    col[j] += c;
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
                }
            }
            let hn = norm(&w);
            col[k + 1] = Complex64::new(hn, 0.0);
            for (j, &(c, s)) in cs.iter().enumerate() {
                let a = col[j];
                let bb = col[j + 1];
                col[j] = a * c + s * bb;
                col[j + 1] = -s.conj() * a + bb * c;
            }
            let (a, bb) = (col[k], col[k + 1]);
            let r = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, ZERO)
            } else if a.norm() == 0.0 {
                (0.0, bb.conj() / bb.norm())
            } else {
                let phase = a / a.norm();
                (a.norm() / r, phase * bb.conj() / r)
            };
            col[k] = a * c + s * bb;
            col[k + 1] = ZERO;
            let gk = g[k];
            g[k] = gk * c;
            g.push(-s.conj() * gk);
            cs.push((c, s));
            h.push(col);
            iterations += 1;
            k += 1;
            rel = g[k].norm() / bnorm;
            if rel <= opts.rtol || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|z| z / hn).collect());
        }
        // Back substitution for the k x k triangular system.
        let mut y = vec![ZERO; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[j][i] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[j]).for_each(|(xi, vi)| *xi += yj * vi);
        }
        log::debug!("gmres restart after {iterations} iterations, estimated residual {rel:e}");
    }
}

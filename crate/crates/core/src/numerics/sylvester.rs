//! Triangular Sylvester equations `T Z + Z B = R` with `T` upper and `B`
//! lower triangular, solved by recursive blocking so that almost all of
//! the work happens in matrix products.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};

const BLOCK: usize = 32;

fn solve_base(t: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>, mut r: MatMut<'_, Complex64>) {
    let m = t.nrows();
    let n = b.nrows();
    for j in (0..n).rev() {
        let bjj = b[(j, j)];
        for i in (0..m).rev() {
            let mut s = r[(i, j)];
            for k in i + 1..m {
                s -= t[(i, k)] * r[(k, j)];
            }
            for k in j + 1..n {
                s -= r[(i, k)] * b[(k, j)];
            }
            r[(i, j)] = s / (t[(i, i)] + bjj);
        }
    }
}

fn solve_rec(t: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>, r: MatMut<'_, Complex64>) {
    let m = t.nrows();
    let n = b.nrows();
    let minus_one = Complex64::new(-1.0, 0.0);
    if m <= BLOCK && n <= BLOCK {
        solve_base(t, b, r);
    } else if m >= n {
        let h = m / 2;
        let (mut top, mut bot) = r.split_at_row_mut(h);
        solve_rec(t.submatrix(h, h, m - h, m - h), b, bot.as_mut());
        matmul(top.as_mut(), Accum::Add, t.submatrix(0, h, h, m - h), bot.as_ref(), minus_one, Par::Seq);
        solve_rec(t.submatrix(0, 0, h, h), b, top);
    } else {
        let h = n / 2;
        let (mut left, mut right) = r.split_at_col_mut(h);
        solve_rec(t, b.submatrix(h, h, n - h, n - h), right.as_mut());
        matmul(left.as_mut(), Accum::Add, right.as_ref(), b.submatrix(h, 0, n - h, h), minus_one, Par::Seq);
        solve_rec(t, b.submatrix(0, 0, h, h), left);
    }
}

/// Overwrites `r` with the solution `Z` of `T Z + Z B = R`.
///
/// Only the upper triangle of `t` and the lower triangle of `b` are read.
/// Fails when some `t_ii + b_jj` is (numerically) zero.
pub fn solve_triangular_sylvester(t: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>, r: MatMut<'_, Complex64>) -> Result<()> {
    let m = t.nrows();
    let n = b.nrows();
    if t.ncols() != m || b.ncols() != n || r.nrows() != m || r.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Sylvester with T {}x{}, B {}x{}, R {}x{}",
            t.nrows(),
            t.ncols(),
            b.nrows(),
            b.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    let scale = (0..m).map(|i| t[(i, i)].norm()).chain((0..n).map(|j| b[(j, j)].norm())).fold(0.0f64, f64::max);
    let threshold = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut smallest = f64::INFINITY;
    for i in 0..m {
        for j in 0..n {
            smallest = smallest.min((t[(i, i)] + b[(j, j)]).norm());
        }
    }
    if smallest <= threshold {
        return Err(Error::Singular { pivot: smallest, threshold });
    }
    solve_rec(t, b, r);
    Ok(())
}

/// Shifted solver for `T Z - Z T^H + mu Z = R` with `T` upper triangular.
pub struct ShiftedSylvester {
    t: Mat<Complex64>,
    b: Mat<Complex64>,
}

impl ShiftedSylvester {
    pub fn new(t: Mat<Complex64>, mu: Complex64) -> Self {
        let n = t.nrows();
        let b = Mat::from_fn(n, n, |i, j| {
            let v = if i >= j { -t[(j, i)].conj() } else { Complex64::new(0.0, 0.0) };
            if i == j {
                v + mu
            } else {
                v
            }
        });
        Self { t, b }
    }

    pub fn t(&self) -> MatRef<'_, Complex64> {
        self.t.as_ref()
    }

    pub fn solve_in_place(&self, r: MatMut<'_, Complex64>) -> Result<()> {
        solve_triangular_sylvester(self.t.as_ref(), self.b.as_ref(), r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Mat<Complex64> {
        Mat::from_fn(m, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn max_diff(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
        let mut d = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                d = d.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        d
    }

    #[test]
    fn recursive_solution_satisfies_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(m, n) in &[(5, 7), (40, 33), (150, 97)] {
            let mut t = random(&mut rng, m, m);
            let mut b = random(&mut rng, n, n);
            for i in 0..m {
                for j in 0..i {
                    t[(i, j)] = Complex64::new(0.0, 0.0);
                }
                t[(i, i)] += Complex64::new(3.0, 0.0);
            }
            for i in 0..n {
                for j in i + 1..n {
                    b[(i, j)] = Complex64::new(0.0, 0.0);
                }
                b[(i, i)] += Complex64::new(3.0, 0.0);
            }
            let r = random(&mut rng, m, n);
            let mut z = r.clone();
            solve_triangular_sylvester(t.as_ref(), b.as_ref(), z.as_mut()).unwrap();
            let lhs = &t * &z + &z * &b;
            assert!(max_diff(lhs.as_ref(), r.as_ref()) < 1e-10, "size {m}x{n}");
        }
    }

    #[test]
    fn shifted_form_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 70;
        let mut t = random(&mut rng, n, n);
        for i in 0..n {
            for j in 0..i {
                t[(i, j)] = Complex64::new(0.0, 0.0);
            }
            t[(i, i)] = Complex64::new(rng.random_range(-5.0..5.0), -rng.random_range(0.1..2.0));
        }
        let mu = Complex64::new(0.0, -1e-3);
        let solver = ShiftedSylvester::new(t.clone(), mu);
        let r = random(&mut rng, n, n);
        let mut z = r.clone();
        solver.solve_in_place(z.as_mut()).unwrap();
        let lhs = &t * &z - &z * t.adjoint() + Mat::<Complex64>::from_fn(n, n, |i, j| mu * z[(i, j)]);
        assert!(max_diff(lhs.as_ref(), r.as_ref()) < 1e-9);
    }

    #[test]
    fn singular_pair_is_rejected() {
        let t = Mat::from_fn(2, 2, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let b = Mat::from_fn(2, 2, |i, j| if i == j { Complex64::new(-1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let mut r = Mat::<Complex64>::zeros(2, 2);
        assert!(matches!(solve_triangular_sylvester(t.as_ref(), b.as_ref(), r.as_mut()), Err(Error::Singular { .. })));
    }
}

//! Globally adaptive Gauss-Kronrod (7/15) quadrature of vector-valued
//! integrands, and the frequency integral of the spectral matrix built on it.

use num_complex::Complex64;

use super::dense::DenseMatrix;
use super::eigen::spectral_abscissa;
use super::linsolve::DenseLu;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-11, rel_tol: 1e-10, max_subdivisions: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

fn kronrod_segment<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<Vec<Complex64>>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let n = fc.len();
    let mut kron: Vec<Complex64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<Complex64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        for k in 0..n {
            let s = f1[k] + f2[k];
            kron[k] += s * WGK[j];
            if j % 2 == 1 {
                gauss[k] += s * WG[j / 2];
            }
        }
    }
    let mut error: f64 = 0.0;
    for k in 0..n {
        kron[k] *= half;
        gauss[k] *= half;
        error = error.max((kron[k] - gauss[k]).norm());
    }
    Ok(Segment { a, b, value: kron, error })
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// The error estimate of each segment is the max-norm difference between
/// the Kronrod and embedded Gauss rules; the segment with the largest
/// estimate is bisected until the summed estimate meets the tolerance.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<Vec<Complex64>>
where
    F: FnMut(f64) -> Result<Vec<Complex64>>,
{
    let mut segments = vec![kronrod_segment(&mut f, a, b)?];
    loop {
        let n = segments[0].value.len();
        let mut total = vec![Complex64::new(0.0, 0.0); n];
        let mut err = 0.0;
        for s in &segments {
            for (t, v) in total.iter_mut().zip(&s.value) {
                *t += v;
            }
            err += s.error;
        }
        let scale = total.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if err <= opts.abs_tol.max(opts.rel_tol * scale) {
            return Ok(total);
        }
        if segments.len() >= opts.max_subdivisions {
            return Err(Error::QuadratureNonConvergence { subdivisions: segments.len(), error: err });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(kronrod_segment(&mut f, seg.a, mid)?);
        segments.push(kronrod_segment(&mut f, mid, seg.b)?);
    }
}

/// The spectral matrix `S(w) = (A + i w)^{-1} D (A^T - i w)^{-1} / (2 pi)`.
pub fn spectral_matrix(a: &DenseMatrix, d: &DenseMatrix, omega: f64) -> Result<DenseMatrix> {
    let n = a.rows();
    let shift = Complex64::new(0.0, omega);
    let left = DenseMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] + shift } else { a[(i, j)] });
    // Built directly as (A^T - i w)^T = A - i w.
    let right_t = DenseMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - shift } else { a[(i, j)] });
    let lu_l = DenseLu::new(&left)?;
    // X = left^{-1} D, then row i of S solves (A - i w) s_i = x_i.
    let mut x = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<Complex64> = (0..n).map(|i| d[(i, j)]).collect();
        let sol = lu_l.solve(&col);
        for i in 0..n {
            x[(i, j)] = sol[i];
        }
    }
    let lu_rt = DenseLu::new(&right_t)?;
    let mut s = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let row: Vec<Complex64> = x.row(i).to_vec();
        let sol = lu_rt.solve(&row);
        for j in 0..n {
            s[(i, j)] = sol[j] / (2.0 * std::f64::consts::PI);
        }
    }
    Ok(s)
}

/// Integrates the spectral matrix over the whole frequency axis.
///
/// The substitution `w = s tan(t)` maps the real line onto `(-pi/2, pi/2)`;
/// the integrand decays as `1/w^2`, so the transformed integrand stays
/// bounded at the endpoints. `s` is set from the diagonal of `A`.
pub fn integrate_spectral(a: &DenseMatrix, d: &DenseMatrix, opts: QuadratureOptions) -> Result<DenseMatrix> {
    let n = a.rows();
    if !a.is_square() || d.rows() != n || d.cols() != n {
        return Err(Error::DimensionMismatch("spectral integral needs square A and D of equal size".into()));
    }
    let abscissa = spectral_abscissa(a)?;
    if abscissa >= 0.0 {
        return Err(Error::UnstableDrift { max_real_part: abscissa });
    }
    let scale = (0..n).map(|i| a[(i, i)].norm()).fold(0.0f64, f64::max).max(1e-3);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let integrand = |t: f64| -> Result<Vec<Complex64>> {
        let c = t.cos();
        let omega = scale * t.sin() / c;
        let jac = scale / (c * c);
        Ok(spectral_matrix(a, d, omega)?.into_vec().into_iter().map(|z| z * jac).collect())
    };
    // Split at 0 and at +-pi/4 so features near w ~ s are seen by the first sweep.
    let cuts = [-half_pi, -half_pi / 2.0, 0.0, half_pi / 2.0, half_pi];
    let mut total = vec![Complex64::new(0.0, 0.0); n * n];
    for w in cuts.windows(2) {
        let part = integrate_adaptive(integrand, w[0], w[1], opts)?;
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    DenseMatrix::from_row_major(n, n, total)
}

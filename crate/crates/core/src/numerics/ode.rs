//! Adaptive Dormand-Prince 5(4) integration of complex vector ODEs.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the derivative scale when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, initial_step: None, max_steps: 10_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stepper state. The right-hand side is `f(t, y, dy)`, writing `dy/dt`.
pub struct DormandPrince<F> {
    f: F,
    opts: OdeOptions,
    t: f64,
    h: f64,
    y: Vec<Complex64>,
    dy: Vec<Complex64>,
    k: [Vec<Complex64>; 6],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
    steps: usize,
}

fn axpy_into(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for i in 0..out.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, k) in terms {
            acc += k[i] * c;
        }
        out[i] = y[i] + acc * h;
    }
}

impl<F> DormandPrince<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(mut f: F, t0: f64, y0: Vec<Complex64>, opts: OdeOptions) -> Self {
        let n = y0.len();
        let mut dy = vec![Complex64::new(0.0, 0.0); n];
        f(t0, &y0, &mut dy);
        let h = opts.initial_step.unwrap_or_else(|| {
            let ny = y0.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let nd = dy.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if nd > 0.0 {
                0.01 * (ny.max(opts.atol) / nd).max(1e-12)
            } else {
                1e-3
            }
        });
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            f,
            opts,
            t: t0,
            h,
            y: y0,
            dy,
            k: [z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z.clone(),
            y_new: z,
            steps: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[Complex64] {
        &self.y
    }

    /// Derivative at the current state (free thanks to first-same-as-last).
    pub fn dy(&self) -> &[Complex64] {
        &self.dy
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Takes one accepted step, never passing `t_end`. `span` sets the
    /// underflow scale: steps below `1e-12 * span` are an error.
    pub fn step(&mut self, t_end: f64, span: f64) -> Result<()> {
        loop {
            let remaining = t_end - self.t;
            if remaining <= 0.0 {
                return Ok(());
            }
            let h = self.h.min(remaining);
            if h < 1e-12 * span {
                return Err(Error::StepUnderflow { t: self.t, dt: h });
            }
            self.steps += 1;
            if self.steps > self.opts.max_steps {
                return Err(Error::StepUnderflow { t: self.t, dt: h });
            }
            let t = self.t;
            let [k2, k3, k4, k5, k6, k7] = &mut self.k;
            let k1: &[Complex64] = &self.dy;
            axpy_into(&mut self.tmp, &self.y, h, &[(A21, k1)]);
            (self.f)(t + C2 * h, &self.tmp, k2);
            axpy_into(&mut self.tmp, &self.y, h, &[(A31, k1), (A32, &k2[..])]);
            (self.f)(t + C3 * h, &self.tmp, k3);
            axpy_into(&mut self.tmp, &self.y, h, &[(A41, k1), (A42, &k2[..]), (A43, &k3[..])]);
            (self.f)(t + C4 * h, &self.tmp, k4);
            axpy_into(&mut self.tmp, &self.y, h, &[(A51, k1), (A52, &k2[..]), (A53, &k3[..]), (A54, &k4[..])]);
            (self.f)(t + C5 * h, &self.tmp, k5);
            axpy_into(&mut self.tmp, &self.y, h, &[(A61, k1), (A62, &k2[..]), (A63, &k3[..]), (A64, &k4[..]), (A65, &k5[..])]);
            (self.f)(t + h, &self.tmp, k6);
            axpy_into(&mut self.y_new, &self.y, h, &[(B1, k1), (B3, &k3[..]), (B4, &k4[..]), (B5, &k5[..]), (B6, &k6[..])]);
            (self.f)(t + h, &self.y_new, k7);

            let mut err2 = 0.0;
            for i in 0..self.y.len() {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
                let sc = self.opts.atol + self.opts.rtol * self.y[i].norm().max(self.y_new[i].norm());
                err2 += (e.norm() / sc).powi(2);
            }
            let err = (err2 / self.y.len().max(1) as f64).sqrt();
            if !err.is_finite() {
                self.h = h * 0.1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.t = if h == remaining { t_end } else { t + h };
                std::mem::swap(&mut self.y, &mut self.y_new);
                std::mem::swap(&mut self.dy, k7);
                self.h = h * factor;
                return Ok(());
            }
            self.h = h * factor.min(1.0);
        }
    }
}

/// Integrates from `t0` to `t1` and returns `y(t1)`.
pub fn integrate_ode<F>(f: F, t0: f64, t1: f64, y0: Vec<Complex64>, opts: OdeOptions) -> Result<Vec<Complex64>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let span = (t1 - t0).abs().max(f64::MIN_POSITIVE);
    let mut dp = DormandPrince::new(f, t0, y0, opts);
    while dp.t() < t1 {
        dp.step(t1, span)?;
    }
    Ok(dp.y)
}

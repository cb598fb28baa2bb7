//! Detuning optimization of the full model.

use log::debug;
use serde::{Deserialize, Serialize};

use super::diagnostics::{cavity2_state, min_variance_fock};
use super::hamiltonian::HamiltonianVariant;
use super::space::HilbertConfig;
use super::steady::{solve_steady, SteadyOptions, SteadyState};
use crate::effective::CircuitParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockOptimumOptions {
    /// Uniform scan points across the window before refinement.
    pub scan_points: usize,
    /// Bracket width at which golden-section refinement stops.
    pub tolerance: f64,
    pub steady: SteadyOptions,
}

impl Default for FockOptimumOptions {
    fn default() -> Self {
        Self { scan_points: 5, tolerance: 2e-3, steady: SteadyOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct FockDetuningOptimum {
    pub delta12: f64,
    pub var_min: f64,
    pub state: SteadyState,
    /// `(delta12, var_min)` for every steady state computed, in order.
    pub evaluations: Vec<(f64, f64)>,
}

struct Evaluator<'a> {
    params: &'a CircuitParams,
    config: &'a HilbertConfig,
    variant: HamiltonianVariant,
    opts: &'a SteadyOptions,
    best: Option<(f64, f64, SteadyState)>,
    last: Option<SteadyState>,
    evaluations: Vec<(f64, f64)>,
}

impl Evaluator<'_> {
    fn eval(&mut self, delta12: f64) -> Result<f64> {
        let p = self.params.with_delta12(delta12);
        let state = solve_steady(&p, self.config, self.variant, self.opts, self.last.as_ref().map(|s| &s.rho))?;
        let var = min_variance_fock(&cavity2_state(&state.rho)?)?.1;
        debug!("delta12 = {delta12}: var_min = {var} ({} iterations)", state.iterations);
        self.evaluations.push((delta12, var));
        if self.best.as_ref().is_none_or(|b| var < b.1) {
            self.best = Some((delta12, var, state.clone()));
        }
        self.last = Some(state);
        Ok(var)
    }
}

/// Minimizes the cavity-2 `var_min` over `delta12` in `window`: a uniform
/// scan followed by golden-section refinement around the best scan point,
/// warm-starting each steady state from the previous one.
pub fn optimum_detuning_fock(
    params: &CircuitParams,
    config: &HilbertConfig,
    variant: HamiltonianVariant,
    window: (f64, f64),
    opts: &FockOptimumOptions,
) -> Result<FockDetuningOptimum> {
    let (lo, hi) = window;
    if !(lo < hi) || opts.scan_points < 3 || !(opts.tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("bad detuning search: window {window:?}, {} scan points", opts.scan_points)));
    }
    let mut ev = Evaluator { params, config, variant, opts: &opts.steady, best: None, last: None, evaluations: Vec::new() };
    let n = opts.scan_points;
    let xs: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let mut vals = Vec::with_capacity(n);
    for &x in &xs {
        vals.push(ev.eval(x)?);
    }
    let k = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty scan");
    if k == 0 || k == n - 1 {
        return Err(Error::NoBracket { lo, hi });
    }
    let (mut a, mut b) = (xs[k - 1], xs[k + 1]);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = ev.eval(c)?;
    let mut fd = ev.eval(d)?;
    while b - a > opts.tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = ev.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = ev.eval(d)?;
        }
    }
    let (delta12, var_min, state) = ev.best.expect("evaluated at least once");
    Ok(FockDetuningOptimum { delta12, var_min, state, evaluations: ev.evaluations })
}

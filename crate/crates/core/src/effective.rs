//! Dispersive reduction of the cavity-qubit system to an effective quartic
//! oscillator, and the Hartree relations of its Gaussian decoupling.
//!
//! All rates are in units of `kappa2` unless stated otherwise. The qubit is
//! frozen in a `sigma_z` eigenstate (ground state `-1` by default).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beyond this value of `g / |delta_q|` the fourth-order expansion is unreliable.
pub const DISPERSIVE_WARNING_RATIO: f64 = 0.15;

fn default_kappa2() -> f64 {
    1.0
}

fn default_sigma_z() -> i8 {
    -1
}

/// Physical parameters of the amplifier, cavity and qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    pub kappa1: f64,
    #[serde(default = "default_kappa2")]
    pub kappa2: f64,
    pub eps1_mag: f64,
    #[serde(default)]
    pub eps1_phase: f64,
    #[serde(default)]
    pub g: f64,
    /// Qubit frequency minus the frame frequency `w1`.
    #[serde(default)]
    pub delta_q: f64,
    /// Bare cavity detuning `w2 - w1`.
    #[serde(default)]
    pub delta12: f64,
    #[serde(default = "default_sigma_z")]
    pub sigma_z: i8,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self { kappa1: 50.0, kappa2: 1.0, eps1_mag: 0.0, eps1_phase: 0.0, g: 0.0, delta_q: 0.0, delta12: 0.0, sigma_z: -1 }
    }
}

impl CircuitParams {
    pub fn eps1(&self) -> Complex64 {
        Complex64::from_polar(self.eps1_mag, self.eps1_phase)
    }

    pub fn with_eps1(mut self, eps1_mag: f64) -> Self {
        self.eps1_mag = eps1_mag;
        self
    }

    pub fn with_delta12(mut self, delta12: f64) -> Self {
        self.delta12 = delta12;
        self
    }

    pub fn has_qubit(&self) -> bool {
        self.g != 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.kappa1, self.kappa2, self.eps1_mag, self.eps1_phase, self.g, self.delta_q, self.delta12];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("circuit parameters must be finite".into()));
        }
        if self.kappa1 <= 0.0 || self.kappa2 <= 0.0 {
            return Err(Error::InvalidParameter(format!("decay rates must be positive (kappa1 = {}, kappa2 = {})", self.kappa1, self.kappa2)));
        }
        if self.eps1_mag < 0.0 {
            return Err(Error::InvalidParameter(format!("eps1_mag must be >= 0, got {}", self.eps1_mag)));
        }
        if self.sigma_z != 1 && self.sigma_z != -1 {
            return Err(Error::InvalidParameter(format!("sigma_z must be +1 or -1, got {}", self.sigma_z)));
        }
        if self.has_qubit() && self.delta_q.abs() <= self.g.abs() {
            return Err(Error::InvalidParameter(format!(
                "dispersive regime needs |delta_q| > g (delta_q = {}, g = {})",
                self.delta_q, self.g
            )));
        }
        Ok(())
    }
}

/// Coefficients of the dispersively reduced cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveParams {
    /// Dispersive shift `g^2/dq - g^4/dq^3`.
    pub chi: f64,
    /// Quartic coefficient `g^4/dq^3`.
    pub xi: f64,
    /// Transformed decay rate `kappa2 * coupling_scale^2`.
    pub kappa2_tilde: f64,
    /// `1 + (g^2/dq^2) sigma_z`; scales both the cascade term and the cavity
    /// part of the collapse operator.
    pub coupling_scale: f64,
    /// Effective detuning at zero photon number, `delta12 + chi sigma_z`.
    pub delta12_base: f64,
    /// Signed quartic coefficient `zeta = -xi sigma_z`.
    pub zeta: f64,
}

impl EffectiveParams {
    /// Cascade coefficient `sqrt(kappa1 kappa2) * coupling_scale`.
    pub fn cascade_rate(&self, params: &CircuitParams) -> f64 {
        (params.kappa1 * params.kappa2).sqrt() * self.coupling_scale
    }
}

pub fn reduce(params: &CircuitParams) -> Result<EffectiveParams> {
    params.validate()?;
    let sz = f64::from(params.sigma_z);
    if !params.has_qubit() {
        return Ok(EffectiveParams {
            chi: 0.0,
            xi: 0.0,
            kappa2_tilde: params.kappa2,
            coupling_scale: 1.0,
            delta12_base: params.delta12,
            zeta: 0.0,
        });
    }
    let (g, dq) = (params.g, params.delta_q);
    let ratio = g.abs() / dq.abs();
    if ratio > DISPERSIVE_WARNING_RATIO {
        log::warn!("g/|delta_q| = {ratio:.3} exceeds {DISPERSIVE_WARNING_RATIO}; dispersive expansion may be inaccurate");
    }
    let g2 = g * g;
    let xi = g2 * g2 / (dq * dq * dq);
    let chi = g2 / dq - xi;
    let coupling_scale = 1.0 + g2 / (dq * dq) * sz;
    Ok(EffectiveParams {
        chi,
        xi,
        kappa2_tilde: params.kappa2 * coupling_scale * coupling_scale,
        coupling_scale,
        delta12_base: params.delta12 + chi * sz,
        zeta: -xi * sz,
    })
}

/// Normal-ordered second moments `<a^dag a>` and `<a a>` of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HartreeState {
    pub n_bar: f64,
    pub aa: Complex64,
}

impl HartreeState {
    pub const VACUUM: HartreeState = HartreeState { n_bar: 0.0, aa: Complex64 { re: 0.0, im: 0.0 } };

    /// Ideal squeezed vacuum with squeeze parameter `r` along `P`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        Self { n_bar: r.sinh().powi(2), aa: Complex64::new(-r.cosh() * r.sinh(), 0.0) }
    }
}

/// Mean-field two-photon drive `eps = -2 i zeta <aa>`.
pub fn hartree_drive(zeta: f64, state: &HartreeState) -> Complex64 {
    Complex64::new(0.0, -2.0 * zeta) * state.aa
}

/// Self-consistent detuning `delta12 + chi sigma_z + 2 zeta n_bar`; for the
/// ground state this is `delta12 - chi + 2 xi n_bar`.
pub fn effective_detuning(_params: &CircuitParams, eff: &EffectiveParams, n_bar: f64) -> f64 {
    eff.delta12_base + 2.0 * eff.zeta * n_bar
}

/// Closed-system evolution of the decoupled quartic oscillator with frame
/// frequency `omega_tilde`: only the phase of `<aa>` moves.
pub fn closed_phase_evolution(omega_tilde: f64, zeta: f64, state: &HartreeState, t: f64) -> HartreeState {
    let rate = 2.0 * zeta * state.n_bar + zeta + omega_tilde;
    HartreeState { n_bar: state.n_bar, aa: state.aa * Complex64::from_polar(1.0, -2.0 * rate * t) }
}

/// Wick-factorized `<a^dag a a^dag a>` of a zero-mean Gaussian state.
pub fn factorized_fourth_moment(state: &HartreeState) -> f64 {
    2.0 * state.n_bar * state.n_bar + state.aa.norm_sqr() + state.n_bar
}

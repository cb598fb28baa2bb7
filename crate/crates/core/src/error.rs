use std::path::PathBuf;

use num_complex::Complex64;

/// Which linear-stability boundary of the drift matrix was crossed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `|eps1| = kappa1 / 2`.
    ParametricAmplifier,
    /// `sqrt(|eps|^2 - delta^2) = kappa / 2` for the driven cavity.
    EffectiveCavity,
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::ParametricAmplifier => write!(f, "parametric-amplifier threshold (|eps1| >= kappa1/2)"),
            Threshold::EffectiveCavity => write!(f, "effective-cavity threshold (sqrt(|eps|^2 - delta^2) >= kappa/2)"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular: pivot {pivot:e} below {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("drift matrix is unstable: max eigenvalue real part {max_real_part:e} >= 0")]
    UnstableDrift { max_real_part: f64 },

    #[error("system is above the {threshold}: max real part {max_real_part:e}")]
    AboveThreshold { threshold: Threshold, max_real_part: f64 },

    #[error("adaptive quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    QuadratureNonConvergence { subdivisions: usize, error: f64 },

    #[error("ODE step size underflow at t = {t}: dt = {dt:e}")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("self-consistent iteration did not converge after {iterations} iterations (last eps = {last_eps}, change {change:e})")]
    NonConvergence { iterations: usize, last_eps: Complex64, change: f64 },

    #[error("GMRES did not converge after {iterations} iterations (relative residual {residual:e})")]
    KrylovNonConvergence { iterations: usize, residual: f64 },

    #[error("variance has no interior minimum in the detuning window [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("steady-state residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("steady state is not positive: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("direct solve needs a {required}-dimensional superoperator, above the cap of {cap}")]
    MemoryBudget { required: usize, cap: usize },

    #[error("operator/state configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("malformed state file: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

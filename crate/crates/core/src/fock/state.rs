//! Dense density matrices, expectation values and partial traces.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::{FockOperator, HilbertConfig, Subsystem};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, DenseMatrix};

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// What space a density matrix lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Layout {
    Full { config: HilbertConfig },
    /// A single tensor factor with `levels` basis states.
    Reduced { subsystem: Subsystem, levels: usize },
}

impl Layout {
    pub fn dim(&self) -> usize {
        match self {
            Layout::Full { config } => config.dim(),
            Layout::Reduced { levels, .. } => *levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub layout: Layout,
    pub matrix: DenseMatrix,
}

/// Results of checking the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_error <= HERMITICITY_TOLERANCE && self.trace_error <= TRACE_TOLERANCE && self.min_eigenvalue >= -POSITIVITY_TOLERANCE
    }
}

impl DensityMatrix {
    pub fn new(layout: Layout, matrix: DenseMatrix) -> Result<Self> {
        let d = layout.dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::ConfigMismatch(format!("{}x{} matrix for a space of dimension {d}", matrix.rows(), matrix.cols())));
        }
        Ok(Self { layout, matrix })
    }

    /// `|k><k|` on the given layout.
    pub fn basis_state(layout: Layout, k: usize) -> Self {
        let d = layout.dim();
        let mut m = DenseMatrix::zeros(d, d);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self { layout, matrix: m }
    }

    /// Pure state from amplitudes (normalized here).
    pub fn pure(layout: Layout, psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.len() != layout.dim() || norm2 == 0.0 {
            return Err(Error::ConfigMismatch("state vector length does not match the layout, or it is zero".into()));
        }
        let d = psi.len();
        let m = DenseMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm2);
        Ok(Self { layout, matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `(rho + rho^dag) / 2`.
    pub fn hermitize(&mut self) {
        let adj = self.matrix.adjoint();
        let sum = &self.matrix + &adj;
        self.matrix = sum.scale(Complex64::new(0.5, 0.0));
    }

    pub fn normalize(&mut self) {
        let t = self.trace();
        self.matrix = self.matrix.scale(t.inv());
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let d = self.dim();
        let m = Mat::from_fn(d, d, |i, j| 0.5 * (self.matrix[(i, j)] + self.matrix[(j, i)].conj()));
        hermitian_eigenvalues(m.as_ref())
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        Ok(StateDiagnostics {
            hermiticity_error: self.matrix.hermiticity_error(),
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: self.eigenvalues()?.first().copied().unwrap_or(0.0),
        })
    }

    pub fn config(&self) -> Option<HilbertConfig> {
        match self.layout {
            Layout::Full { config } => Some(config),
            Layout::Reduced { .. } => None,
        }
    }
}

/// `Tr(op rho)`.
pub fn expect(op: &FockOperator, rho: &DensityMatrix) -> Result<Complex64> {
    if rho.config() != Some(op.config) {
        return Err(Error::ConfigMismatch("operator and state live on different spaces".into()));
    }
    Ok(op.matrix.triplets().fold(Complex64::new(0.0, 0.0), |acc, (i, k, v)| acc + v * rho.matrix[(k, i)]))
}

/// Reduced state of one tensor factor.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let config = rho.config().ok_or_else(|| Error::ConfigMismatch("partial trace needs a full-space state".into()))?;
    let pos = keep.position(&config)?;
    let dims = config.factor_dims();
    let n = dims[pos];
    let inner: usize = dims[pos + 1..].iter().product();
    let outer: usize = dims[..pos].iter().product();
    let mut out = DenseMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for o in 0..outer {
                for i in 0..inner {
                    let r = (o * n + a) * inner + i;
                    let c = (o * n + b) * inner + i;
                    s += rho.matrix[(r, c)];
                }
            }
            out[(a, b)] = s;
        }
    }
    DensityMatrix::new(Layout::Reduced { subsystem: keep, levels: n }, out)
}

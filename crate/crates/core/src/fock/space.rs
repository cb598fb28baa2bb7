//! Truncated Hilbert space `cavity1 ⊗ cavity2 ⊗ qubit` and its operators.
//!
//! Basis index of `|i1, i2, q>` is `(i1 * n2 + i2) * nq + q` with `nq = 2`
//! when the qubit is present. Qubit level 0 is the ground state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertConfig {
    #[serde(default = "default_n1")]
    pub n1: usize,
    #[serde(default = "default_n2")]
    pub n2: usize,
    #[serde(default = "default_include_qubit")]
    pub include_qubit: bool,
}

fn default_n1() -> usize {
    10
}

fn default_n2() -> usize {
    50
}

fn default_include_qubit() -> bool {
    true
}

impl Default for HilbertConfig {
    fn default() -> Self {
        Self { n1: default_n1(), n2: default_n2(), include_qubit: true }
    }
}

impl HilbertConfig {
    pub fn new(n1: usize, n2: usize, include_qubit: bool) -> Result<Self> {
        let c = Self { n1, n2, include_qubit };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::InvalidParameter(format!("Fock cutoffs must be >= 2 (n1 = {}, n2 = {})", self.n1, self.n2)));
        }
        Ok(())
    }

    pub fn nq(&self) -> usize {
        if self.include_qubit {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.n1 * self.n2 * self.nq()
    }

    pub fn index(&self, i1: usize, i2: usize, q: usize) -> usize {
        (i1 * self.n2 + i2) * self.nq() + q
    }

    /// Factor dimensions in tensor order.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut d = vec![self.n1, self.n2];
        if self.include_qubit {
            d.push(2);
        }
        d
    }
}

/// A tensor factor of the Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    Cavity1,
    Cavity2,
    Qubit,
}

impl Subsystem {
    pub fn position(self, config: &HilbertConfig) -> Result<usize> {
        match self {
            Subsystem::Cavity1 => Ok(0),
            Subsystem::Cavity2 => Ok(1),
            Subsystem::Qubit if config.include_qubit => Ok(2),
            Subsystem::Qubit => Err(Error::ConfigMismatch("configuration has no qubit".into())),
        }
    }
}

/// Sparse operator tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub config: HilbertConfig,
    pub matrix: SparseMatrix,
}

impl FockOperator {
    pub fn new(config: HilbertConfig, matrix: SparseMatrix) -> Result<Self> {
        if matrix.dim() != config.dim() {
            return Err(Error::ConfigMismatch(format!("operator of dimension {} for a space of dimension {}", matrix.dim(), config.dim())));
        }
        Ok(Self { config, matrix })
    }

    pub fn adjoint(&self) -> Self {
        Self { config: self.config, matrix: self.matrix.adjoint() }
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.hermiticity_error()
    }
}

/// Truncated annihilation operator on `n` levels.
pub fn destroy(n: usize) -> SparseMatrix {
    let t = (1..n).map(|k| (k - 1, k, Complex64::new((k as f64).sqrt(), 0.0))).collect();
    SparseMatrix::from_triplets(n, t).expect("indices in range")
}

pub fn number(n: usize) -> SparseMatrix {
    let t = (1..n).map(|k| (k, k, Complex64::new(k as f64, 0.0))).collect();
    SparseMatrix::from_triplets(n, t).expect("indices in range")
}

/// Lowering operator `|0><1|` of the qubit.
pub fn qubit_lower() -> SparseMatrix {
    SparseMatrix::from_triplets(2, vec![(0, 1, Complex64::new(1.0, 0.0))]).expect("indices in range")
}

/// `sigma_z = diag(-1, +1)` in the (ground, excited) basis.
pub fn qubit_sigma_z() -> SparseMatrix {
    SparseMatrix::from_triplets(2, vec![(0, 0, Complex64::new(-1.0, 0.0)), (1, 1, Complex64::new(1.0, 0.0))]).expect("indices in range")
}

/// Ladder and Pauli operators embedded in the full space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub config: HilbertConfig,
    pub a1: SparseMatrix,
    pub a2: SparseMatrix,
    /// Present only when the configuration includes the qubit.
    pub sigma_minus: Option<SparseMatrix>,
    pub sigma_z: Option<SparseMatrix>,
    pub identity: SparseMatrix,
}

/// Embeds a single-factor operator at tensor position `pos`.
pub fn embed(config: &HilbertConfig, pos: usize, op: &SparseMatrix) -> SparseMatrix {
    config
        .factor_dims()
        .iter()
        .enumerate()
        .map(|(k, &n)| if k == pos { op.clone() } else { SparseMatrix::identity(n) })
        .reduce(|acc, f| acc.kron(&f))
        .expect("at least two factors")
}

pub fn build_operators(config: &HilbertConfig) -> Result<OperatorSet> {
    config.validate()?;
    let (sigma_minus, sigma_z) = if config.include_qubit {
        (Some(embed(config, 2, &qubit_lower())), Some(embed(config, 2, &qubit_sigma_z())))
    } else {
        (None, None)
    };
    Ok(OperatorSet {
        config: *config,
        a1: embed(config, 0, &destroy(config.n1)),
        a2: embed(config, 1, &destroy(config.n2)),
        sigma_minus,
        sigma_z,
        identity: SparseMatrix::identity(config.dim()),
    })
}

impl OperatorSet {
    pub fn n1(&self) -> SparseMatrix {
        embed(&self.config, 0, &number(self.config.n1))
    }

    pub fn n2(&self) -> SparseMatrix {
        embed(&self.config, 1, &number(self.config.n2))
    }

    pub fn op(&self, m: SparseMatrix) -> FockOperator {
        FockOperator { config: self.config, matrix: m }
    }
}

//! Rotating-frame Hamiltonian and collapse operator of the cascaded system.
//! Every subsystem rotates at the amplifier frequency `w1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::{build_operators, FockOperator, HilbertConfig, OperatorSet};
use crate::effective::{reduce, CircuitParams};
use crate::error::{Error, Result};
use crate::numerics::SparseMatrix;

/// Which cavity-2 Hamiltonian to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianVariant {
    /// Bare Jaynes-Cummings coupling, all orders of the qubit nonlinearity.
    #[default]
    Full,
    /// Fourth-order dispersive Hamiltonian with the qubit frozen at
    /// `sigma_z`, plus the transformed cascade and collapse couplings.
    /// Requires a configuration without the qubit factor.
    Dispersive,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Cascade term `-(i r / 2)(a1 a2^dag - a1^dag a2)` with rate `r`.
fn cascade_term(ops: &OperatorSet, rate: f64) -> SparseMatrix {
    let forward = ops.a2.adjoint().matmul(&ops.a1);
    forward.add_scaled(&forward.adjoint(), c(-1.0, 0.0)).scale(c(0.0, -rate / 2.0))
}

/// Squeezing drive `(i/2)(eps1 a1^dag^2 - eps1^* a1^2)`.
fn amplifier_term(ops: &OperatorSet, eps1: Complex64) -> SparseMatrix {
    let a1sq = ops.a1.matmul(&ops.a1);
    let up = a1sq.adjoint().scale(eps1 * c(0.0, 0.5));
    up.add(&up.adjoint())
}

pub fn build_hamiltonian(params: &CircuitParams, config: &HilbertConfig, variant: HamiltonianVariant) -> Result<FockOperator> {
    params.validate()?;
    let ops = build_operators(config)?;
    let n2 = ops.n2();
    let mut h = amplifier_term(&ops, params.eps1());
    match variant {
        HamiltonianVariant::Full => {
            h = h.add_scaled(&n2, c(params.delta12, 0.0));
            if let (Some(sm), Some(sz)) = (&ops.sigma_minus, &ops.sigma_z) {
                h = h.add_scaled(sz, c(params.delta_q / 2.0, 0.0));
                let jc = ops.a2.matmul(&sm.adjoint());
                h = h.add_scaled(&jc.add(&jc.adjoint()), c(params.g, 0.0));
            }
            h = h.add(&cascade_term(&ops, (params.kappa1 * params.kappa2).sqrt()));
        }
        HamiltonianVariant::Dispersive => {
            if config.include_qubit {
                return Err(Error::ConfigMismatch("the dispersive variant freezes the qubit; use include_qubit = false".into()));
            }
            let eff = reduce(params)?;
            let s = f64::from(params.sigma_z);
            let id = &ops.identity;
            let n2sq = n2.matmul(&n2);
            h = h
                .add_scaled(&n2, c(params.delta12 - eff.xi + eff.chi * s, 0.0))
                .add_scaled(id, c((params.delta_q / 2.0 + eff.chi / 2.0) * s, 0.0))
                .add_scaled(&n2sq, c(-eff.xi * s, 0.0))
                .add(&cascade_term(&ops, eff.cascade_rate(params)));
        }
    }
    FockOperator::new(*config, h)
}

/// Combined collapse operator `sqrt(kappa1) a1 + sqrt(kappa2) a2`; the
/// dispersive variant scales the cavity-2 part by the coupling factor.
pub fn build_collapse(params: &CircuitParams, config: &HilbertConfig, variant: HamiltonianVariant) -> Result<FockOperator> {
    let ops = build_operators(config)?;
    let scale = match variant {
        HamiltonianVariant::Full => 1.0,
        HamiltonianVariant::Dispersive => reduce(params)?.coupling_scale,
    };
    let m = ops.a1.scale(c(params.kappa1.sqrt(), 0.0)).add_scaled(&ops.a2, c(params.kappa2.sqrt() * scale, 0.0));
    FockOperator::new(*config, m)
}

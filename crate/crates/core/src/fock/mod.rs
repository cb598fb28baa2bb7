//! Truncated-Fock-space simulation of the full cascaded model.

pub mod diagnostics;
pub mod hamiltonian;
pub mod liouvillian;
pub mod optimize;
pub mod persist;
pub mod space;
pub mod state;
pub mod steady;

pub use hamiltonian::{build_collapse, build_hamiltonian, HamiltonianVariant};
pub use liouvillian::{build_liouvillian, Liouvillian};
pub use space::{build_operators, FockOperator, HilbertConfig, OperatorSet, Subsystem};
pub use state::{expect, partial_trace, DensityMatrix, Layout, StateDiagnostics};
pub use steady::{relative_residual, solve_steady, steady_state, SteadyMethod, SteadyOptions, SteadyState};
pub use diagnostics::{
    cavity2_state, ideal_squeezed_distribution, min_variance_fock, moment_error, moments, number_distribution, quadrature_variance_fock, truncation_report,
    truncation_report_from, wigner, GridSpec, ModeMoments, MomentError, TruncationReport, WignerGrid,
};
pub use optimize::{optimum_detuning_fock, FockDetuningOptimum, FockOptimumOptions};
pub use persist::{decode_state, encode_state, read_state, write_state, StateHeader};

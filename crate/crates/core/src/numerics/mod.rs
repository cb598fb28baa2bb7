//! Linear algebra, quadrature and time-stepping building blocks.

pub mod dense;
pub mod eigen;
pub mod krylov;
pub mod linsolve;
pub mod lyapunov;
pub mod ode;
pub mod quadrature;
pub mod sparse;
pub mod sylvester;

pub use dense::DenseMatrix;
pub use eigen::{complex_schur, eigenvalues, hermitian_eigenvalues, spectral_abscissa, Schur};
pub use krylov::{gmres, GmresOptions, GmresOutcome};
pub use linsolve::{solve_dense, solve_linear, solve_sparse, DenseLu, LinearSystem};
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use ode::{integrate_ode, DormandPrince, OdeOptions};
pub use quadrature::{integrate_adaptive, integrate_spectral, spectral_matrix, QuadratureOptions};
pub use sparse::SparseMatrix;
pub use sylvester::{solve_triangular_sylvester, ShiftedSylvester};

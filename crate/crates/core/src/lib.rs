//! Restarted GMRES with the GMRES minimum-residual polynomial as a right
//! preconditioner.
//!
//! The crate is organised bottom-up:
//!
//! * [`sparse`] holds CSR storage, SpMV, Matrix Market I/O and the test-matrix
//!   generators (bidiagonal, 2-D Laplacian, convection-diffusion).
//! * [`ortho`] is the two-pass classical Gram-Schmidt kernel.
//! * [`polyprec`] builds the minimum-residual polynomial from a power basis via
//!   the normal equations, applies it, and selects a degree automatically.
//! * [`ilu`] is ILU(0) on the matrix's own pattern, used as a left preconditioner.
//! * [`gmres`] is GMRES(m) with Givens least squares and true-residual restarts.
//!
//! Every operator application, inner product and vector update is tallied in a
//! [`CostCounters`] so that SpMVs (neighbour communication) and dot products
//! (global reductions) can be compared across preconditioner choices.

// `!(x > tol)` is used on purpose so that NaN counts as failure
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counters;
pub mod gmres;
pub mod ilu;
pub mod operator;
pub mod ortho;
pub mod polyprec;
pub mod rng;
pub mod sparse;
pub(crate) mod vecops;

pub use counters::CostCounters;
pub use gmres::{
    cost_report, hessenberg_lsq, solve, CostReport, GmresConfig, GmresResult, HistoryEntry,
    SolverError,
};
pub use ilu::{ilu0_apply, ilu0_factor, ilu0_factor_shifted, Ilu0Factors, IluError};
pub use operator::{LeftPreconditioned, LinearOperator, OperatorKind, PolyWrapped};
pub use ortho::{icgs, OrthoResult};
pub use polyprec::{
    apply_poly, auto_degree, build_poly, dense_cholesky, lambda_p_lambda, CholeskyFailure,
    GramSystem, PolyCoefficients, PolyError, SeedMode,
};
pub use rng::XorShift64Star;
pub use sparse::{CsrMatrix, SparseError};

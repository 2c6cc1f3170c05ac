//! Sparse matrix storage, Matrix Market I/O and deterministic test-matrix
//! generators.

mod csr;
mod generators;
mod market;

pub use csr::CsrMatrix;
pub use generators::{
    bidiag1, bidiag2, gen_bidiag, gen_convdiff2d, gen_laplacian2d, gen_laplacian_rhs, wind,
};
pub use market::{read_matrix_market, read_matrix_market_file, write_matrix_market};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix must have at least one row")]
    EmptyMatrix,
    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

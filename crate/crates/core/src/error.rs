//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver failed to converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("invalid site dimensions: {0}")]
    InvalidDims(String),

    #[error("total dimension {total} exceeds the cap {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("invalid two-level selection: {0}")]
    InvalidSelection(String),

    #[error("invalid site subset: {0}")]
    InvalidSubset(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),

    #[error("search space of {size} selections exceeds the exhaustive cap {cap}; use random:N instead")]
    SearchCapExceeded { size: usize, cap: usize },

    #[error("state file, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

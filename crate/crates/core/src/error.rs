use thiserror::Error;

/// Errors produced by the construction, decomposition and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid grid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension {dim} exceeds the realization cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed term: {0}")]
    MalformedTerm(String),

    #[error("linear solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// Returns `log2(n)` when `n` is a positive power of two.
pub(crate) fn exact_log2(n: usize) -> Option<usize> {
    if n == 0 || !n.is_power_of_two() {
        None
    } else {
        Some(n.trailing_zeros() as usize)
    }
}

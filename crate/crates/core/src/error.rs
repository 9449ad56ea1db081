use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("tabulated weight has no value at j = {0}")]
    WeightRange(i64),

    #[error("unknown test-function kind `{0}`")]
    UnknownKind(String),

    #[error("non-finite sample encountered during quadrature")]
    NonFiniteSample,

    #[error("no frequency cells intersect the grid box")]
    EmptyCellSet,

    #[error("sample points are not dyadically aligned: {0}")]
    Misaligned(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input out of domain: {0}")]
    OutOfDomain(String),

    #[error("operator is not coercive on this mesh: zero pivot at row {row} (pivot {pivot:e})")]
    NonCoercive { row: usize, pivot: f64 },

    #[error("positive-definite factorization failed at row {row}: smallest pivot {pivot:e}")]
    Factorization { row: usize, pivot: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

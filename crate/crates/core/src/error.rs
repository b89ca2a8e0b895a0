use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdsfmError {
    #[error("atom {index}: {reason}")]
    InvalidAtom { index: usize, reason: String },

    #[error("incidence set of size {size} exceeds the exhaustive limit of {limit}")]
    Capacity { size: usize, limit: usize },

    #[error("bound unavailable: {0}")]
    BoundUnavailable(String),

    #[error("weight matrix entry {index} is {value}, expected a finite positive value")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QdsfmError>;

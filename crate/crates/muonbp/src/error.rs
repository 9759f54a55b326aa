use thiserror::Error;

/// Errors surfaced by tensor, sharding, and optimizer operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix contains non-finite entries ({context})")]
    NonFinite { context: String },

    #[error("shape mismatch: expected {expected:?}, got {got:?} ({context})")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
        context: String,
    },

    #[error("partition does not tile the {axis} axis: {detail}")]
    PartitionMismatch { axis: &'static str, detail: String },

    #[error("{axis} dimension {dim} is not divisible by sharding degree {degree}")]
    UnevenSharding {
        axis: &'static str,
        dim: usize,
        degree: usize,
    },

    #[error("shard map changed shard {device} shape from {expected:?} to {got:?}")]
    ShardShapeChanged {
        device: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("non-finite gradient rejected at step {step}")]
    NonFiniteGradient { step: u64 },

    #[error("horizon {horizon} is not divisible by period {period}")]
    HorizonNotDivisible { horizon: u64, period: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

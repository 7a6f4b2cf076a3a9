use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: usize, reason: &'static str },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tensor of order {order} and dimension {dim} exceeds the entry limit of {limit}")]
    TooLarge { order: usize, dim: usize, limit: usize },

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("index {index:?} out of range for dimension {dim}")]
    IndexOutOfRange { index: Vec<usize>, dim: usize },

    #[error("order {order} is outside the supported range: {reason}")]
    OrderOutOfRange { order: usize, reason: &'static str },

    #[error("witness is not unit-preserving (P I Q != I)")]
    NotUnitPreserving,

    #[error("row {row} of Q has {count} entries above the structural threshold, expected exactly one")]
    MalformedWitnessRow { row: usize, count: usize },

    #[error("witness does not match its structured form: max deviation {deviation:e}")]
    InconsistentWitness { deviation: f64 },

    #[error("diagonal scaling entry {index} is zero")]
    ZeroScaling { index: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("dimension {dim} is too large for exhaustive search (max {max})")]
    SearchTooLarge { dim: usize, max: usize },

    #[error("eigenvalue iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

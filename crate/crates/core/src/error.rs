use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(usize),

    #[error("{what} = {value} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        value: i64,
        bound: usize,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported dimension {d}: {reason}")]
    UnsupportedDimension { d: usize, reason: &'static str },

    #[error("no addition table for GF({0}); supported orders are 4, 8, 9")]
    UnsupportedField(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("class {class} is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositive { class: usize, min_eig: f64 },

    #[error("{count} entries outside the support pattern, first: {positions:?}")]
    SupportViolation {
        count: usize,
        positions: Vec<(usize, usize)>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

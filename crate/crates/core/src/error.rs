use thiserror::Error;

/// Errors raised by the instance model, operators and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QapError {
    #[error("empty input")]
    EmptyInput,

    #[error("parse error at token {token} (line {line}, column {column}): {message}")]
    Parse {
        token: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("format error: expected {expected} tokens, found {found}")]
    TokenCount { expected: usize, found: usize },

    #[error("invalid problem size {0}: need n >= 2")]
    InvalidSize(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("instance has no linear cost matrix")]
    MissingLinearCost,

    #[error("instance too large for exhaustive search: n = {n} exceeds {max}")]
    TooLarge { n: usize, max: usize },

    #[error("index {index} out of bounds for n = {n}")]
    IndexOutOfBounds { index: usize, n: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("coefficient of variation undefined: window mean is zero with non-zero spread")]
    UndefinedCv,

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = QapError> = std::result::Result<T, E>;

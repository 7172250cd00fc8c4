use thiserror::Error;

pub type Result<T> = std::result::Result<T, QmxError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmxError {
    #[error("non-invertible series: {0}")]
    NonInvertible(String),

    #[error("no normalised square root: {0}")]
    NotASquare(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("form is not weight-homogeneous")]
    NotHomogeneous,

    #[error("the space of weight {w} and depth <= {l} is zero")]
    EmptySpace { l: u32, w: i64 },

    /// Raised whenever a truncation is too short to certify an answer.
    /// Callers may retry with a longer expansion.
    #[error("increase precision: {0}")]
    InsufficientPrecision(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("singular matrix, kernel vector {kernel:?}")]
    Singular { kernel: Vec<String> },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl QmxError {
    pub fn is_precision(&self) -> bool {
        matches!(self, QmxError::InsufficientPrecision(_))
    }
}

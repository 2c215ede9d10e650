use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (negative isqrt input,
    /// zero scale factor, excluded parameter value, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands live over different indeterminate lists, or a point or
    /// parameter tuple has the wrong length.
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("polynomial is not the square of a polynomial")]
    NotAPolynomialSquare,

    /// Input that fails a precondition of a construction (non semi-magic
    /// matrix, failed cell equality, unverified pair, ...).
    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("bound too small: minimal N is {required}")]
    BoundTooSmall { required: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

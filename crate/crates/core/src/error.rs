use thiserror::Error;

#[derive(Debug, Error)]
pub enum UalgError {
    #[error("operation `{0}` not found in signature")]
    UnknownOp(String),
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("relation size mismatch: {0}")]
    SizeMismatch(String),
    #[error("carrier too large: {0}")]
    CarrierTooLarge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported identity system: {0}")]
    UnsupportedSystem(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, UalgError>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("extension degree {0} out of range (1..=16)")]
    DegreeOutOfRange(u32),
    #[error("element {bits:#x} is not in GF(2^{m})")]
    ElementOutOfRange { bits: u32, m: u32 },
    #[error("operands belong to different fields ({left} vs {right})")]
    FieldMismatch { left: String, right: String },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("basis elements are linearly dependent over GF(2)")]
    DependentBasis,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis violated: {identity}: {detail}")]
    Hypothesis { identity: String, detail: String },
    #[error("work budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { line: e.line(), msg: e.to_string() }
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("construction failed: {message} (face census {faces:?})")]
    Construction { message: String, faces: Vec<usize> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid path: {0}")]
    Path(String),
    #[error("modulus mismatch: {0}")]
    Modulus(String),
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("state cap {cap} exceeded ({needed} states)")]
    CapExceeded { cap: u64, needed: u64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Construction { .. } => "construction",
            Error::Unsupported(_) => "unsupported",
            Error::Path(_) => "invalid-path",
            Error::Modulus(_) => "modulus-mismatch",
            Error::Regime(_) => "regime",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::Overflow(_) => "overflow",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

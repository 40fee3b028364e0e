use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classes of failure, used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or a violated precondition.
    Usage,
    /// A configured size or budget cap was hit.
    Cap,
    /// A mathematical check did not hold.
    Math,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{k} exceeds the size cap of {cap} elements")]
    FieldTooLarge { p: u64, k: u32, cap: u64 },
    #[error("operands belong to different fields ({0} and {1})")]
    FieldMismatch(String, String),
    #[error("inverse of zero")]
    DivisionByZero,
    #[error("cannot embed {src} into {dst}")]
    IncompatibleFields { src: String, dst: String },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::FieldTooLarge { .. } | Error::CapExceeded(_) => ErrorKind::Cap,
            Error::Inconsistent(_) | Error::SearchFailed(_) => ErrorKind::Math,
            _ => ErrorKind::Usage,
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}

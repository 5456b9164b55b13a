use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no prime of the form {n}*d + 1 below {cap}")]
    SearchExhausted { n: u64, cap: u64 },

    #[error("table of {entries} entries exceeds the addressable limit of {limit}")]
    TableOverflow { entries: u128, limit: u128 },

    #[error("table budget exceeded: {needed} > {cap}")]
    Budget { needed: u128, cap: u128 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("capacity: {0}")]
    Capacity(String),

    #[error("carry overflow: coefficient {index} = {value} exceeds bound {bound}")]
    CarryOverflow { index: usize, value: u128, bound: u128 },

    #[error("verification failed: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Errors raised while reading or writing table files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic")]
    BadMagic,

    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),

    #[error("truncated file")]
    Truncated,

    #[error("malformed table file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

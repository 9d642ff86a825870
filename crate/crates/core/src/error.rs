use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("matrix is not invertible over F3")]
    NotInvertible,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn dimension(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }
}

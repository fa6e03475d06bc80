use thiserror::Error;

use crate::expr::{DomainError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("invalid chart data: {0}")]
    Chart(String),
    #[error("frame is not orthonormal at the point: {0}")]
    Frame(String),
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown metric '{0}' (not a file and not a catalog entry)")]
    UnknownSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

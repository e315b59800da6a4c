use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("unsupported quotient: relator {relator} has worst piece ratio {ratio:.4}")]
    UnsupportedQuotient { relator: String, ratio: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("vertex not in truncation: {0}")]
    VertexNotFound(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MalformedInput(e.to_string())
    }
}

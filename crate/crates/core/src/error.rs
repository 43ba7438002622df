use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the engine. Each variant maps to a stable category
/// string so the command line can report failures in a machine-readable way.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("exactness check failed: {0}")]
    Exactness(String),
    #[error("verification mismatch: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Config(_) => "config",
            Error::Range(_) => "range",
            Error::Contract(_) => "contract",
            Error::WindowTooSmall(_) => "window",
            Error::Inconsistent(_) => "inconsistent",
            Error::Exactness(_) => "exactness",
            Error::Verification(_) => "verification",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status used by the command line for this category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 3,
            Error::Config(_) => 4,
            Error::Range(_) => 5,
            Error::Contract(_) => 6,
            Error::WindowTooSmall(_) => 7,
            Error::Inconsistent(_) => 8,
            Error::Exactness(_) => 9,
            Error::Verification(_) => 10,
            Error::Io(_) => 11,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

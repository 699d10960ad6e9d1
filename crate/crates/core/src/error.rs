use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error kinds raised by the library. Each maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A result is not representable as a finite `f64`.
    #[error("range error: {0}")]
    Range(String),
    /// An operation was called with inputs of the wrong kind.
    #[error("usage error: {0}")]
    Usage(String),
    /// A sampling grid does not capture the wavefunction.
    #[error("grid error: {0}")]
    Grid(String),
    /// A grid is too coarse to resolve an oscillating phase.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// A finite-difference estimate failed its stability check.
    #[error("numerics error: {0}")]
    Numerics(String),
    /// The semiclassical model is used outside its validity domain.
    #[error("model-validity error: {0}")]
    ModelValidity(String),
    /// A configuration value failed validation; `path` is the dotted key.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    /// The configuration file could not be parsed.
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 2 config, 3 numerics, 4 model validity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } | Error::Io(_) | Error::Usage(_) => 2,
            Error::ModelValidity(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use std::fmt;
use std::io;

/// Errors raised by model construction, scoring and file ingestion.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A mathematical precondition was violated (bad dimension, zero divisor, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data.
    #[error("{location}: {message}")]
    Data { location: Location, message: String },

    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Where in an input a data error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub file: String,
    /// 1-based line number, when the error is tied to one line.
    pub line: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}", self.file, line),
            None => f.write_str(&self.file),
        }
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data_at(file: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Data {
            location: Location {
                file: file.to_string(),
                line: Some(line),
            },
            message: msg.into(),
        }
    }

    pub(crate) fn data(file: &str, msg: impl Into<String>) -> Self {
        Error::Data {
            location: Location {
                file: file.to_string(),
                line: None,
            },
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl fmt::Display, source: io::Error) -> Self {
        Error::Io {
            path: path.to_string(),
            source,
        }
    }

    /// Line number of a data error, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Data { location, .. } => location.line,
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

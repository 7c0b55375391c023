use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// The variants are grouped by the exit-code class the command-line front end
/// maps them to; see [`Error::class`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("clamping budget exceeded: {clamped} of {n} draws below the domain of {utility}")]
    ClampBudget {
        utility: String,
        clamped: usize,
        n: usize,
    },

    #[error("generation failed for scenario '{scenario}': {reason}")]
    Generation { scenario: String, reason: String },

    #[error("{path}: row {row}: {msg}")]
    Ingestion {
        path: PathBuf,
        row: usize,
        msg: String,
    },

    #[error("config error in [{section}] {key}: {msg}")]
    Config {
        section: String,
        key: String,
        msg: String,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Ingestion,
    Generation,
    Domain,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Usage(_) | Error::Config { .. } => ErrorClass::Usage,
            Error::Ingestion { .. } | Error::Io(_) => ErrorClass::Ingestion,
            Error::Generation { .. } | Error::ClampBudget { .. } => ErrorClass::Generation,
            Error::InvalidParameter(_)
            | Error::Domain(_)
            | Error::InfeasibleTarget(_)
            | Error::Unsupported(_)
            | Error::UndefinedCorrelation(_) => ErrorClass::Domain,
        }
    }

    pub(crate) fn ingestion(path: impl Into<PathBuf>, row: usize, msg: impl Into<String>) -> Self {
        Error::Ingestion {
            path: path.into(),
            row,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

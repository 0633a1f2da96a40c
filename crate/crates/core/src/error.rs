use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation requires a family with the monotone ratio property ({0})")]
    UnsupportedFamily(String),

    /// Every constraint of the curve sits at level 1.
    #[error("degenerate curve: no constraint with level below 1")]
    DegenerateCurve,

    #[error("exhaustive constraint search supports at most {max} constraints, got {got}; use the greedy selection instead")]
    TooManyConstraints { got: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from user input validation rather than data.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::UnsupportedFamily(_)
                | Error::DegenerateCurve
                | Error::TooManyConstraints { .. }
                | Error::Config(_)
        )
    }
}

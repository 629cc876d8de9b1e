use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("integration failure at t = {time:.6} us: min eigenvalue {min_eigenvalue:.3e} below -1e-6")]
    Integration { time: f64, min_eigenvalue: f64 },

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<String> },

    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dim(expected: impl Into<String>, found: impl ToString) -> Self {
        Error::Dimension {
            expected: expected.into(),
            found: found.to_string(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Innermost error, looking through scenario wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Scenario { source, .. } => source.root(),
            other => other,
        }
    }
}

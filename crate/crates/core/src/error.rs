use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("format error: {0}")]
    Format(String),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("index {index} out of range (limit {limit})")]
    Range { index: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("every row is missing; imputation is undefined")]
    MissingEverything,

    #[error("numerical instability in {method} at iteration {iteration}: {hint}")]
    NumericalInstability {
        method: &'static str,
        iteration: usize,
        hint: String,
    },

    #[error("series does not converge: {0}")]
    Divergent(String),

    #[error("singular system at pivot {0}")]
    Singular(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short stable identifier of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::EmptyDataset => "empty_dataset",
            Error::Format(_) => "format",
            Error::Truncated { .. } => "truncated",
            Error::Range { .. } => "range",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::InvalidConfig(_) => "invalid_config",
            Error::MissingEverything => "missing_everything",
            Error::NumericalInstability { .. } => "numerical_instability",
            Error::Divergent(_) => "divergent",
            Error::Singular(_) => "singular",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

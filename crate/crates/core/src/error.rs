use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at data row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("binning error at data row {row}: value {value} of `{column}` falls outside every bin")]
    Binning {
        row: usize,
        column: String,
        value: f64,
    },

    #[error("type error: {0}")]
    Type(String),

    #[error("undefined rate: {notion} for group {group} has no rows in its conditioning event")]
    UndefinedRate { notion: String, group: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("rule syntax error on line {line}: {message}")]
    RuleSyntax { line: usize, message: String },

    #[error("rule set has no `otherwise` clause")]
    MissingDefault,

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible threshold: {0}")]
    InfeasibleThreshold(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure stems from configuration or file access rather
    /// than from a computation on valid inputs.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Io { .. } | Error::Csv { .. } | Error::InvalidArgument(_)
        )
    }
}

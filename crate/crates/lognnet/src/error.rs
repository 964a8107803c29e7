//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("schema mismatch: column {column} is \"{found}\", expected \"{expected}\"")]
    Schema {
        column: usize,
        expected: String,
        found: String,
    },

    #[error("cannot parse \"{value}\" at row {row}, column {column}")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("label \"{value}\" at row {row} is outside {{0, 1}}")]
    Label { row: usize, value: String },

    #[error("feature \"{feature}\" has no observed values to impute from")]
    Imputation { feature: String },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("invalid feature mask: {0}")]
    Mask(String),

    #[error("cannot balance training set: {0}")]
    Balance(String),

    #[error("cannot split folds: {0}")]
    Fold(String),

    #[error("class \"{0}\" has no samples")]
    MissingClass(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, one per failure family. The CLI
    /// prints these so scripts can branch on them.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "E_PARAM",
            Error::Schema { .. } => "E_SCHEMA",
            Error::Parse { .. } => "E_PARSE",
            Error::Label { .. } => "E_LABEL",
            Error::Imputation { .. } => "E_IMPUTE",
            Error::Shape(_) => "E_SHAPE",
            Error::Mask(_) => "E_MASK",
            Error::Balance(_) => "E_BALANCE",
            Error::Fold(_) => "E_FOLD",
            Error::MissingClass(_) => "E_CLASS",
            Error::Config(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Csv(_) => "E_CSV",
            Error::Json(_) => "E_JSON",
        }
    }
}

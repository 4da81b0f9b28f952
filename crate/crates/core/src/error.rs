use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A data row whose field count disagrees with the header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaggedRow {
    /// 1-based data row number (the header is not counted).
    pub row: usize,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed CSV: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("column `{column}` not found in header")]
    MissingColumn { column: String },

    #[error("ragged rows: {}", describe_ragged(.0))]
    RaggedRows(Vec<RaggedRow>),

    #[error("row {row}: label `{value}` is neither an ASD nor a non-ASD class")]
    UnknownLabel { row: usize, value: String },

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NotNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: missing value in column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    Divergence { epoch: usize, loss: f64 },

    #[error("class {class} present in {present_in} data but absent from {absent_from} data")]
    ClassMismatch {
        class: u8,
        present_in: &'static str,
        absent_from: &'static str,
    },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("client {client_id}, round {round}: {source}")]
    Client {
        client_id: usize,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error (or the error it wraps) is a numeric divergence.
    pub fn is_divergence(&self) -> bool {
        match self {
            Error::Divergence { .. } => true,
            Error::Client { source, .. } => source.is_divergence(),
            _ => false,
        }
    }
}

fn describe_ragged(rows: &[RaggedRow]) -> String {
    rows.iter()
        .map(|r| {
            format!(
                "row {} has {} fields (expected {})",
                r.row, r.found, r.expected
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

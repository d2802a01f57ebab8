use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the controllability pipeline.
///
/// Row and column positions are 1-based, as a user would count them in the
/// source file.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NonSquare { rows: usize, cols: usize },

    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("negative weight {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("cannot parse {text:?} at row {row}, column {col}")]
    Unparsable {
        row: usize,
        col: usize,
        text: String,
    },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("every node is isolated; nothing is left after removal")]
    EmptyNetwork,

    #[error("node id {id} is out of range for a network of {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("input set is empty")]
    EmptyInputSet,

    #[error("duplicate input node {id}")]
    DuplicateInput { id: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "matrix exponential overflows double precision (spectral radius estimate {spectral_radius:.4e}, horizon {horizon})"
    )]
    Overflow { spectral_radius: f64, horizon: f64 },

    #[error("region {id} ({label}): {source}")]
    Region {
        id: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("label list has {found} entries but the network has {expected} nodes")]
    LabelCount { expected: usize, found: usize },

    #[error("network ids do not match: {0}")]
    MismatchedIds(String),

    #[error("non-positive trace {0}")]
    NonPositiveTrace(f64),

    #[error("malformed record: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "non_square",
            Error::RaggedRow { .. } => "ragged_row",
            Error::NegativeEntry { .. } => "negative_entry",
            Error::Unparsable { .. } => "unparsable",
            Error::EmptyMatrix => "empty_matrix",
            Error::EmptyNetwork => "empty_network",
            Error::NodeOutOfRange { .. } => "node_out_of_range",
            Error::EmptyInputSet => "empty_input_set",
            Error::DuplicateInput { .. } => "duplicate_input",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Overflow { .. } => "overflow",
            Error::Region { source, .. } => source.kind(),
            Error::LabelCount { .. } => "label_count",
            Error::MismatchedIds(_) => "mismatched_ids",
            Error::NonPositiveTrace(_) => "non_positive_trace",
            Error::Format(_) => "format",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate-wide error type and result alias.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("significance level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("too few samples: {0}")]
    TooFewSamples(String),

    #[error("column {index} is degenerate: {reason}")]
    DegenerateColumn { index: usize, reason: String },

    #[error("every auxiliary outcome was dropped as degenerate")]
    AllAuxiliariesDegenerate,

    #[error("support size {s_hat} >= n = {n}; support-corrected variance undefined")]
    SfDegenerate { s_hat: usize, n: usize },

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("zero vector passed to {0}")]
    ZeroVector(&'static str),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid simulation layout: {0}")]
    InvalidLayout(String),

    #[error("auxiliary outcome {index}: {source}")]
    InAuxiliary {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("negative entry at row {row}, column {column}: {value}")]
    NegativeInput { row: usize, column: usize, value: f64 },

    #[error("non-positive value after offset at row {row}, column {column}: {value}")]
    NonPositive { row: usize, column: usize, value: f64 },

    #[error("{path}: parse error at line {line}: {message}")]
    ParseError { path: String, line: usize, message: String },

    #[error("{path}: row at line {line} has {got} fields, expected {expected}")]
    RaggedRows { path: String, line: usize, expected: usize, got: usize },

    #[error("{path}: non-numeric cell at line {line}, column {column}: {value:?}")]
    NonNumericCell { path: String, line: usize, column: usize, value: String },

    #[error("unknown outcome name {0:?} (matching is exact and case-sensitive)")]
    UnknownOutcome(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidParam(_) => "invalid_param",
            Error::InvalidAlpha(_) => "invalid_alpha",
            Error::TooFewSamples(_) => "too_few_samples",
            Error::DegenerateColumn { .. } => "degenerate_column",
            Error::AllAuxiliariesDegenerate => "all_auxiliaries_degenerate",
            Error::SfDegenerate { .. } => "sf_degenerate",
            Error::ZeroVariance(_) => "zero_variance",
            Error::ZeroVector(_) => "zero_vector",
            Error::OutOfRange(_) => "out_of_range",
            Error::InvalidLayout(_) => "invalid_layout",
            Error::InAuxiliary { .. } => "auxiliary_failure",
            Error::NegativeInput { .. } => "negative_input",
            Error::NonPositive { .. } => "non_positive",
            Error::ParseError { .. } => "parse_error",
            Error::RaggedRows { .. } => "ragged_rows",
            Error::NonNumericCell { .. } => "non_numeric_cell",
            Error::UnknownOutcome(_) => "unknown_outcome",
            Error::Numerical(_) => "numerical",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code for the CLI: 1 usage, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_)
            | Error::InvalidAlpha(_)
            | Error::Config(_)
            | Error::UnknownOutcome(_)
            | Error::InvalidLayout(_) => 1,
            Error::DimensionMismatch(_)
            | Error::NonFinite(_)
            | Error::TooFewSamples(_)
            | Error::NegativeInput { .. }
            | Error::NonPositive { .. }
            | Error::ParseError { .. }
            | Error::RaggedRows { .. }
            | Error::NonNumericCell { .. }
            | Error::OutOfRange(_)
            | Error::ZeroVariance(_)
            | Error::ZeroVector(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::DegenerateColumn { .. }
            | Error::AllAuxiliariesDegenerate
            | Error::SfDegenerate { .. }
            | Error::Numerical(_) => 3,
            Error::InAuxiliary { source, .. } => source.exit_code(),
        }
    }
}

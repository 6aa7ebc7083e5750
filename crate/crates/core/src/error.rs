use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite: pivot {pivot:e} at row {row}")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("column {0} is identically zero")]
    ZeroColumn(usize),

    #[error("sequence increases at position {index} ({previous} -> {next})")]
    NonMonotone {
        index: usize,
        previous: f64,
        next: f64,
    },

    #[error("argument {value} outside the domain of {what}")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("correction denominator {denominator} is not positive at k = {k}")]
    DegenerateDenominator { k: usize, denominator: i64 },

    #[error("input of length {len} exceeds the maximum of {max}")]
    TooLarge { len: usize, max: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {message}")]
    Index { line: usize, message: String },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable snake_case tag for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ZeroColumn(_) => "zero_column",
            Error::NonMonotone { .. } => "non_monotone",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::TooLarge { .. } => "too_large",
            Error::Parse { .. } => "parse",
            Error::Index { .. } => "index",
            Error::UnknownLabel(_) => "unknown_label",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

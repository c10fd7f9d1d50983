use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("negative quadratic form v'Av = {value:e}")]
    NegativeQuadraticForm { value: f64 },

    #[error("singular Hessenberg matrix (zero pivot in column {column})")]
    SingularMatrix { column: usize },

    #[error("invalid spectral estimates: {0}")]
    InvalidEstimates(String),

    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),

    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed Matrix Market file (line {line}): {reason}")]
    MalformedFile { line: usize, reason: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("product requested along the zero direction")]
    ZeroDirection,

    #[error("value {value:e} outside the admissible range [{lo:e}, {hi:e}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("accuracy target {0:e} must lie in (0, 1)")]
    InvalidAccuracy(f64),

    #[error("residual norm vanished; the solution has been reached")]
    DegenerateResidual,

    #[error("non-positive curvature p'(A+E)p = {value:e} at iteration {iteration}")]
    IndefiniteCurvature { iteration: usize, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, used as the termination label of failed runs.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NegativeQuadraticForm { .. } => "NegativeQuadraticForm",
            Error::SingularMatrix { .. } => "SingularHessenberg",
            Error::InvalidEstimates(_) => "InvalidEstimates",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::MalformedFile { .. } => "MalformedFile",
            Error::Io { .. } => "Io",
            Error::ZeroDirection => "ZeroDirection",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::InvalidAccuracy(_) => "InvalidAccuracy",
            Error::DegenerateResidual => "DegenerateResidual",
            Error::IndefiniteCurvature { .. } => "IndefiniteCurvature",
            Error::Config(_) => "Config",
        }
    }
}

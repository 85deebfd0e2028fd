use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlsError {
    #[error("exponent must be >= 1 or infinity, got {0}")]
    InvalidExponent(f64),
    #[error("weights must be finite and strictly positive (index {index}, value {value})")]
    InvalidWeight { index: usize, value: f64 },
    #[error("measure space must contain at least one point")]
    EmptySpace,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("function values must be finite (index {0})")]
    NonFiniteValue(usize),
    #[error("tail level must be nonnegative, got {0}")]
    NegativeLevel(f64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid exponent interval [{a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("exponent {p} lies outside the domain {domain}")]
    OutOfDomain { p: f64, domain: String },
    #[error("grid must contain at least one exponent")]
    EmptyGrid,
    #[error("natural function family is empty")]
    EmptyFamily,
    #[error("natural function family contains only zero functions")]
    ZeroFamily,
    #[error("measure spaces differ between operator and argument")]
    SpaceMismatch,
    #[error("oracle size guard: source dimension {size} exceeds {limit} (override required)")]
    OracleGuard { size: usize, limit: usize },
    #[error("function is not normalized: GLS norm {0} exceeds 1")]
    NotNormalized(f64),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("certificate has not been witnessed by a sigma-condition check")]
    UnwitnessedCertificate,
    #[error("degenerate fundamental function value {0} (hypothesis failure)")]
    DegenerateFundamental(f64),
    #[error("not a magic square: {0}")]
    NotMagic(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, GlsError>;

impl From<serde_json::Error> for GlsError {
    fn from(e: serde_json::Error) -> Self {
        GlsError::Malformed(e.to_string())
    }
}

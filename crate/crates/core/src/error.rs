use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),

    #[error("malformed group table: {0}")]
    MalformedGroup(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("elements belong to different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("irrep registry is incomplete: sum of squared dimensions {dim_square_sum} != order {order}")]
    IncompleteRegistry { dim_square_sum: usize, order: usize },

    #[error("bad exponent {0}")]
    BadExponent(f64),

    #[error("polynomial is not homogeneous of degree {degree}: residual {residual:e}")]
    HomogeneityViolation { degree: usize, residual: f64 },

    #[error("pair {index} is not orthogonal: residual {residual:e}")]
    NotOrthogonal { index: usize, residual: f64 },

    #[error("representation check failed: residual {residual:e} exceeds {tol:e}")]
    VerificationFailure { residual: f64, tol: f64 },

    #[error("grid of {points} points is too coarse for degree cap {cap} (need at least {required})")]
    UnderSampled { points: usize, cap: usize, required: usize },

    #[error("degree {0} outside the supported range 2..=6")]
    DegreeOutOfRange(usize),

    #[error("norm {norm} is not available on {domain}")]
    UnsupportedNorm { norm: String, domain: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

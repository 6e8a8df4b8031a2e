use thiserror::Error;

/// Errors raised across the library. Every failure is reported; nothing is
/// silently clamped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is rank deficient (pivot norm {pivot:.3e})")]
    RankDeficient { pivot: f64 },
    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },
    #[error("matrix is not positive definite (pivot {pivot:.3e})")]
    NotPositiveDefinite { pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("linear program infeasible: target lies outside the generator span")]
    Infeasible,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("instance generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("unsupported dimension {0}: Sylvester construction needs a power of two up to 64")]
    UnsupportedDimension(usize),
    #[error(
        "walk stalled: {frozen} of {required} required coordinates frozen after {steps} steps"
    )]
    WalkStalled {
        frozen: usize,
        required: usize,
        steps: usize,
    },
    #[error("instance too large for exhaustive search: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("covariances not ordered: B - A has eigenvalue {min_eig:.3e}")]
    NotOrdered { min_eig: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

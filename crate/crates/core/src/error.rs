use thiserror::Error;

/// Errors raised by the geometric primitives, volume oracles and experiment
/// harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate direction: coincident centres")]
    DegenerateDirection,

    #[error("dependent basis: residual norm {residual:e} at vector {index}")]
    DependentBasis { index: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample count must be positive")]
    ZeroSamples,

    #[error("grid resolution {h} is coarser than delta/4 = {limit}")]
    CoarseResolution { h: f64, limit: f64 },

    #[error("infeasible family: {requested} centres requested but the grid holds {capacity}")]
    InfeasibleCount { requested: usize, capacity: usize },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("radius {radius} of sphere {index} lies outside [1, 2]")]
    RadiusOutOfRange { index: usize, radius: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

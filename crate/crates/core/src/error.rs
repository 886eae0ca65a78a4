//! Error type shared by all solver and evaluation routines.

/// Errors produced by kernel evaluation, domain geometry and the solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernel gradient is undefined at coincident points")]
    CoincidentPoints,

    #[error("geodesic kernel requires both points on the unit circle")]
    OffUnitCircle,

    #[error("sphere sampling supports ambient dimension 1 <= p <= 5, got {0}")]
    UnsupportedSphereDim(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

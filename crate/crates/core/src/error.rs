use crate::numerics::NumericsError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-positive coefficient: {0}")]
    NonPositiveCoefficient(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("quadrature order too low: {n} points give {value_n}, {n2} give {value_2n}")]
    QuadratureOrderTooLow { n: usize, n2: usize, value_n: f64, value_2n: f64 },
    #[error("trace unavailable: {0}")]
    TraceUnavailable(String),
    #[error("non-quadratic potential: {0}")]
    NonQuadraticPotential(String),
    #[error("rank-deficient constraint: {0}")]
    RankDeficientConstraint(String),
    #[error("insufficient data: need at least 3 rows, got {0}")]
    InsufficientData(usize),
    #[error("allocation of {bytes} bytes failed")]
    OutOfMemory { bytes: usize },
}

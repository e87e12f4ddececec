//! Sparse and dense linear algebra, quadrature, and the implicit midpoint
//! integrator for descriptor systems.

pub mod banded;
pub mod dense;
pub mod eigen;
pub mod quadrature;
pub mod solve;
pub mod sparse;
pub mod stepper;

pub use banded::SparseLu;
pub use dense::DenseMatrix;
pub use eigen::{inverse_power_iteration, EigenPair};
pub use solve::{solve_linear, solve_saddle, LinearSolveReport, SaddleFactor};
pub use sparse::{SparseMatrix, Triplets};
pub use stepper::{implicit_midpoint_step, integrate, MidpointStepper, StepOutput};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("singular matrix: pivot {pivot:.3e} at unknown {index}")]
    SingularMatrix { index: usize, pivot: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank-deficient constraint: {0}")]
    RankDeficientConstraint(String),
    #[error("solver breakdown: {0}")]
    SolverBreakdown(String),
    #[error("allocation of {bytes} bytes failed")]
    OutOfMemory { bytes: usize },
}

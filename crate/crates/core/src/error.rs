use thiserror::Error;

use crate::projection::ProjectionResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution is empty")]
    Empty,
    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    BadSum { sum: f64 },
    #[error("non-finite weight at index {index}")]
    NonFinite { index: usize },
    #[error("alpha must be a positive finite number, got {0}")]
    InvalidAlpha(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("constraint {row} is unsatisfiable by any probability distribution")]
    Infeasible { row: usize },
    #[error("constraints admit no probability distribution")]
    EmptyFamily,
    #[error("gradient undefined: {0}")]
    UndefinedGradient(&'static str),
    #[error("reference distribution must have full support (zero mass at index {index})")]
    QNotFullSupport { index: usize },
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<ProjectionResult>,
    },
    #[error("least-squares system for the power-law fit is degenerate")]
    DegenerateSystem,
    #[error("pythagorean gap is indeterminate (inf - inf)")]
    Indeterminate,
    #[error("verification failed on {} of {total} samples", .violations.len())]
    VerificationFailed {
        total: usize,
        violations: Vec<usize>,
    },
    #[error("linear family is a single point")]
    ZeroDimensional { point: Vec<f64> },
    #[error("chart dimension {0} exceeds the oracle limit of 3")]
    DimensionTooHigh(usize),
    #[error("no lattice point at step {step} lies inside the feasible set")]
    NoFeasibleLatticePoint { step: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Relative alpha-entropy on finite alphabets and its minimization over
//! linear families of distributions.
//!
//! The minimizer (the projection of `Q` onto the family) has a power-law form;
//! this crate computes it, certifies the form and checks the Pythagorean
//! relations it satisfies.

// Negated comparisons are used so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod divergence;
pub mod error;
pub mod family;
pub mod feasibility;
mod linalg;
pub mod oracle;
pub mod problem;
pub mod projection;
pub mod sampling;
pub mod sweep;

pub use distribution::{validate_distribution, Alpha, Distribution};
pub use divergence::{
    alpha_gradient, kl_divergence, relative_alpha_entropy, renyi_entropy, shannon_entropy,
    DivergenceValue,
};
pub use error::{Error, Result};
pub use family::{homogenize, membership_residual, LinearFamily};
pub use feasibility::{family_support, feasible_point, solve_lp, LpSolution, LpStatus, SupportSet};
pub use oracle::{
    grid_oracle, grid_oracle_search, null_space_chart, NullSpaceChart, OracleOutcome,
};
pub use problem::{ProblemSpec, RawConstraint, RawProblem};
pub use projection::{
    certify_power_law, project, project_descent, project_parametric, pythagorean_gap,
    verify_projection, Certificate, ProjectOptions, ProjectionResult, PythagoreanReport,
    SolverChoice, SolverKind,
};
pub use sweep::{sweep_alpha, SweepPoint, SweepRow};

//! Projections over a range of orders.

use rayon::prelude::*;

use crate::distribution::{Alpha, Distribution};
use crate::family::LinearFamily;
use crate::projection::{project, ProjectOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub divergence: f64,
    pub support_size: usize,
    pub theta: Vec<f64>,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    /// The error message when this order could not be solved.
    pub outcome: Result<SweepPoint, String>,
}

fn solve_one(q: &Distribution, family: &LinearFamily, a: f64, opts: &ProjectOptions) -> SweepRow {
    let outcome = Alpha::new(a)
        .and_then(|alpha| project(q, family, alpha, opts))
        .map(|r| SweepPoint {
            divergence: r.divergence,
            support_size: r.p_star.support().len(),
            theta: r.theta,
            z: r.z,
        })
        .map_err(|e| e.to_string());
    SweepRow { alpha: a, outcome }
}

/// One row per entry of `alphas`, in input order. With `parallel` the rows
/// are computed concurrently; the output is identical either way.
pub fn sweep_alpha(
    q: &Distribution,
    family: &LinearFamily,
    alphas: &[f64],
    opts: &ProjectOptions,
    parallel: bool,
) -> Vec<SweepRow> {
    if parallel {
        alphas
            .par_iter()
            .map(|&a| solve_one(q, family, a, opts))
            .collect()
    } else {
        alphas
            .iter()
            .map(|&a| solve_one(q, family, a, opts))
            .collect()
    }
}

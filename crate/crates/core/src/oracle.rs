//! Brute-force ground truth: enumerate a lattice on the feasible polytope and
//! keep the best point.
//!
//! The feasible set `simplex ∩ L` is charted as `base + span(basis)`, where
//! `basis` is orthonormal and spans the directions that preserve every
//! constraint, normalization, and the zeros outside `Supp(L)`.

use rayon::prelude::*;

use crate::distribution::{Alpha, Distribution};
use crate::divergence::alpha_entropy_of_weights;
use crate::error::{Error, Result};
use crate::family::LinearFamily;
use crate::feasibility::{family_support, feasible_point};
use crate::linalg;

/// Largest chart dimension the lattice search accepts.
pub const MAX_ORACLE_DIM: usize = 3;

#[derive(Debug, Clone)]
pub struct NullSpaceChart {
    pub base_point: Distribution,
    /// Orthonormal rows, each of length `n`.
    pub basis: Vec<Vec<f64>>,
}

impl NullSpaceChart {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `base + sum_j t_j basis_j`, unclipped.
    pub fn point(&self, t: &[f64]) -> Vec<f64> {
        let mut p = self.base_point.weights().to_vec();
        for (b, &tj) in self.basis.iter().zip(t) {
            linalg::axpy(&mut p, tj, b);
        }
        p
    }
}

pub fn null_space_chart(family: &LinearFamily) -> Result<NullSpaceChart> {
    let n = family.n();
    let support = family_support(family)?;
    let base_point = feasible_point(family, true)?;
    let mut rows = vec![vec![1.0; n]];
    rows.extend(family.rows().iter().cloned());
    for x in (0..n).filter(|&x| !support.contains(x)) {
        let mut e = vec![0.0; n];
        e[x] = 1.0;
        rows.push(e);
    }
    let mut basis = linalg::null_space(&rows, n);
    for b in &mut basis {
        for x in (0..n).filter(|&x| !support.contains(x)) {
            b[x] = 0.0;
        }
    }
    if basis.is_empty() {
        return Err(Error::ZeroDimensional {
            point: base_point.weights().to_vec(),
        });
    }
    Ok(NullSpaceChart { base_point, basis })
}

/// The lattice minimizer and what it cost to find it.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub point: Distribution,
    pub value: f64,
    /// Chart coordinates of the winner (empty for a zero-dimensional family).
    pub coords: Vec<f64>,
    pub evaluated: usize,
    pub feasible: usize,
}

/// Minimizes `I_a(., Q)` over lattice points of the feasible polytope.
pub fn grid_oracle(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    step: f64,
) -> Result<Distribution> {
    grid_oracle_search(q, family, alpha, step).map(|o| o.point)
}

/// Lattice search with diagnostics. See [`grid_oracle`].
///
/// Coordinates run over `t_j = -r + m * step` for `m = 0, 1, ...` while
/// `t_j <= r`, with `r = sqrt(2)`, the diameter of the simplex, which bounds
/// the distance from the base point to any feasible point. Ties in value go to
/// the lexicographically smallest `t`.
pub fn grid_oracle_search(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    step: f64,
) -> Result<OracleOutcome> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    if q.len() != family.n() {
        return Err(Error::DimensionMismatch {
            expected: family.n(),
            found: q.len(),
        });
    }
    let chart = match null_space_chart(family) {
        Ok(c) => c,
        Err(Error::ZeroDimensional { point }) => {
            let point = Distribution::from_nonnegative(&point);
            let value = alpha_entropy_of_weights(point.weights(), q.weights(), alpha)?.value();
            return Ok(OracleOutcome {
                point,
                value,
                coords: Vec::new(),
                evaluated: 1,
                feasible: 1,
            });
        }
        Err(e) => return Err(e),
    };
    let d = chart.dim();
    if d > MAX_ORACLE_DIM {
        return Err(Error::DimensionTooHigh(d));
    }
    if d == MAX_ORACLE_DIM {
        log_cost_warning(d, step);
    }
    let r = std::f64::consts::SQRT_2;
    let per_axis = (2.0 * r / step + 1e-9).floor() as usize + 1;
    let coord = |m: usize| -r + m as f64 * step;
    let total = per_axis.pow(d as u32);

    #[derive(Clone)]
    struct Best {
        value: f64,
        idx: Vec<usize>,
        feasible: usize,
    }
    fn better(a: Best, b: Best) -> Best {
        let feasible = a.feasible + b.feasible;
        let pick_a = match a.value.total_cmp(&b.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a.idx <= b.idx,
        };
        let mut w = if pick_a { a } else { b };
        w.feasible = feasible;
        w
    }
    let none = || Best {
        value: f64::INFINITY,
        idx: Vec::new(),
        feasible: 0,
    };

    let best = (0..per_axis)
        .into_par_iter()
        .map(|m0| {
            let mut best = none();
            let mut idx = vec![0usize; d];
            idx[0] = m0;
            let inner = per_axis.pow(d as u32 - 1);
            let mut t = vec![0.0; d];
            for flat in 0..inner {
                let mut rest = flat;
                for j in (1..d).rev() {
                    idx[j] = rest % per_axis;
                    rest /= per_axis;
                }
                for j in 0..d {
                    t[j] = coord(idx[j]);
                }
                let p = chart.point(&t);
                if p.iter().any(|&w| w < 0.0) {
                    continue;
                }
                let Ok(v) = alpha_entropy_of_weights(&p, q.weights(), alpha) else {
                    continue;
                };
                let cand = Best {
                    value: v.value(),
                    idx: idx.clone(),
                    feasible: 1,
                };
                best = better(best, cand);
            }
            best
        })
        .reduce(none, better);

    if best.feasible == 0 || best.idx.is_empty() {
        return Err(Error::NoFeasibleLatticePoint { step });
    }
    let coords: Vec<f64> = best.idx.iter().map(|&m| coord(m)).collect();
    Ok(OracleOutcome {
        point: Distribution::from_nonnegative(&chart.point(&coords)),
        value: best.value,
        coords,
        evaluated: total,
        feasible: best.feasible,
    })
}

fn log_cost_warning(d: usize, step: f64) {
    let per_axis = (2.0 * std::f64::consts::SQRT_2 / step).floor() + 1.0;
    eprintln!(
        "warning: lattice oracle in dimension {d} evaluates about {:.1e} points",
        per_axis.powi(d as i32)
    );
}

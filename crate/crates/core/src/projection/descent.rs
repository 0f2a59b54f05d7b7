//! Projected gradient descent on `simplex ∩ L`.
//!
//! Euclidean projection onto the intersection is computed with Dykstra's
//! alternating projections between the affine constraint set and the simplex.

use crate::distribution::Alpha;
use crate::divergence::{alpha_entropy_of_weights, alpha_gradient_of_weights};
use crate::family::LinearFamily;
use crate::linalg;

pub(crate) const DYKSTRA_MAX_SWEEPS: usize = 10_000;
pub(crate) const DYKSTRA_TOL: f64 = 1e-12;
pub(crate) const ARMIJO_C1: f64 = 1e-4;
pub(crate) const ARMIJO_SHRINK: f64 = 0.5;
pub(crate) const PG_TOL: f64 = 1e-9;
pub(crate) const STALL_REL_DECREASE: f64 = 1e-14;
pub(crate) const STALL_WINDOW: usize = 10;

/// Euclidean projection onto `{x >= 0, sum x = 1}` by sorting.
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Orthogonal projector onto `{x : sum x = 1, F x = 0}`.
pub(crate) struct AffineProjector {
    anchor: Vec<f64>,
    /// Orthonormal basis of the row space of `[1; F]`.
    normals: Vec<Vec<f64>>,
}

impl AffineProjector {
    pub(crate) fn new(family: &LinearFamily, anchor: Vec<f64>) -> Self {
        let mut rows = vec![vec![1.0; family.n()]];
        rows.extend(family.rows().iter().cloned());
        let (_, normals) = linalg::independent_rows(&rows, 1e-10);
        Self { anchor, normals }
    }

    pub(crate) fn project(&self, v: &[f64]) -> Vec<f64> {
        let diff: Vec<f64> = v.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
        let mut out = v.to_vec();
        for nrm in &self.normals {
            linalg::axpy(&mut out, -linalg::dot(&diff, nrm), nrm);
        }
        out
    }
}

/// Dykstra's method for the projection of `v` onto `simplex ∩ affine`.
///
/// Returns the simplex-side iterate, so the result is exactly nonnegative.
pub(crate) fn project_feasible(v: &[f64], affine: &AffineProjector) -> Vec<f64> {
    let n = v.len();
    let mut x = v.to_vec();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        let shifted: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = affine.project(&shifted);
        for i in 0..n {
            p[i] = shifted[i] - y[i];
        }
        let shifted: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = project_simplex(&shifted);
        for i in 0..n {
            q[i] = shifted[i] - next[i];
        }
        let change = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let gap = next
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if change <= DYKSTRA_TOL && gap <= DYKSTRA_TOL {
            break;
        }
    }
    x
}

pub(crate) struct DescentOutcome {
    pub p: Vec<f64>,
    pub iterations: usize,
    pub pg_norm: f64,
    pub converged: bool,
}

fn objective(p: &[f64], q: &[f64], alpha: Alpha) -> f64 {
    alpha_entropy_of_weights(p, q, alpha).map_or(f64::INFINITY, |v| v.value())
}

/// Minimizes `I_a(., q)` over `simplex ∩ L` from the feasible `start`.
///
/// For `a <= 1` trial points that zero out a positive coordinate are rejected,
/// which keeps iterates in the relative interior where the gradient is finite.
pub(crate) fn descend(
    q: &[f64],
    family: &LinearFamily,
    alpha: Alpha,
    start: &[f64],
    max_iter: usize,
) -> DescentOutcome {
    let affine = AffineProjector::new(family, start.to_vec());
    let keep_interior = !alpha.above_one();
    let mut p = start.to_vec();
    let mut f = objective(&p, q, alpha);
    let mut history = vec![f];
    let mut pg_norm = f64::INFINITY;
    for it in 0..max_iter {
        let Ok(g) = alpha_gradient_of_weights(&p, q, alpha) else {
            break;
        };
        if g.iter().any(|x| !x.is_finite()) {
            break;
        }
        let mut eta = 1.0;
        let mut accepted = None;
        for attempt in 0..80 {
            let stepped: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a - eta * b).collect();
            let trial = project_feasible(&stepped, &affine);
            if attempt == 0 {
                pg_norm = trial
                    .iter()
                    .zip(&p)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if pg_norm <= PG_TOL {
                    return DescentOutcome {
                        p,
                        iterations: it,
                        pg_norm,
                        converged: true,
                    };
                }
            }
            let interior_ok =
                !keep_interior || p.iter().zip(&trial).all(|(a, b)| *a <= 0.0 || *b > 0.0);
            if interior_ok {
                let ft = objective(&trial, q, alpha);
                let decrease: f64 = g
                    .iter()
                    .zip(trial.iter().zip(&p))
                    .map(|(gi, (t, c))| gi * (t - c))
                    .sum();
                if ft <= f + ARMIJO_C1 * decrease {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            eta *= ARMIJO_SHRINK;
        }
        let Some((trial, ft)) = accepted else {
            // No admissible step: stationary to working precision.
            return DescentOutcome {
                p,
                iterations: it,
                pg_norm,
                converged: pg_norm <= 1e3 * PG_TOL,
            };
        };
        p = trial;
        f = ft;
        history.push(f);
        if history.len() > STALL_WINDOW {
            let old = history[history.len() - 1 - STALL_WINDOW];
            if (old - f) <= STALL_REL_DECREASE * old.abs().max(f64::MIN_POSITIVE) {
                return DescentOutcome {
                    p,
                    iterations: it + 1,
                    pg_norm,
                    converged: true,
                };
            }
        }
    }
    DescentOutcome {
        iterations: max_iter,
        converged: pg_norm <= PG_TOL,
        pg_norm,
        p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_basics() {
        assert_eq!(project_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn dykstra_lands_on_the_intersection() {
        let fam = LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap();
        let anchor = vec![6.0 / 7.0, 0.0, 0.0, 1.0 / 7.0];
        let aff = AffineProjector::new(&fam, anchor);
        let x = project_feasible(&[0.1, 0.9, -0.3, 0.4], &aff);
        let s: f64 = x.iter().sum();
        assert!((s - 1.0).abs() < 1e-10);
        assert!(linalg::dot(&x, &fam.rows()[0]).abs() < 1e-10);
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn descent_reaches_counterexample_vertex() {
        let fam = LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap();
        let start = crate::feasibility::feasible_point(&fam, true).unwrap();
        let out = descend(
            &[0.25; 4],
            &fam,
            Alpha::new(2.0).unwrap(),
            start.weights(),
            100_000,
        );
        let expect = [0.75, 0.25, 0.0, 0.0];
        for (p, e) in out.p.iter().zip(expect) {
            assert!((p - e).abs() < 1e-6, "{:?}", out.p);
        }
    }
}

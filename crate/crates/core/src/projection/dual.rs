//! Newton solver for the power-law parameters.
//!
//! With `g(x) = Q(x)^(a-1) + (1-a) theta . f(x)` and `u(x) = [g(x)]_+^(1/(a-1))`,
//! the moment equations `sum_x u(x) f_i(x) = 0` are the stationarity conditions
//! of the convex potential
//!
//! ```text
//! psi(theta) = (1/a) sum_x [g(x)]_+^(a/(a-1))
//! ```
//!
//! whose gradient is `-sum u f` and whose Hessian is `sum_{g>0} (u/g) f f^T`.
//! For `a < 1` the domain is `{g > 0}` on every symbol; for `a > 1` the clip
//! makes `psi` finite and C^1 everywhere. On the KL branch the potential is
//! `log sum Q exp(-theta . f)`.

use crate::family::LinearFamily;
use crate::linalg;

/// The bracket must stay above this on every symbol when `a < 1`.
pub(crate) const BRACKET_FLOOR: f64 = 1e-14;
pub(crate) const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Model {
    Power(f64),
    Kl,
}

pub(crate) struct DualPoint {
    pub psi: f64,
    /// Unnormalized weights `u(x)`.
    pub weights: Vec<f64>,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

pub(crate) struct DualSolution {
    pub theta: Vec<f64>,
    /// Normalized power-law distribution over the symbols of `q`.
    pub p: Vec<f64>,
    pub z: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Evaluates the potential and its derivatives; `None` outside the domain.
pub(crate) fn evaluate(
    model: Model,
    q: &[f64],
    family: &LinearFamily,
    theta: &[f64],
) -> Option<DualPoint> {
    let k = family.k();
    let shift = family.combine(theta);
    let mut weights = vec![0.0; q.len()];
    let mut curv = vec![0.0; q.len()];
    let psi = match model {
        Model::Power(a) => {
            let beta = 1.0 / (a - 1.0);
            let mut psi = 0.0;
            for x in 0..q.len() {
                let g = ((a - 1.0) * q[x].ln()).exp() + (1.0 - a) * shift[x];
                if a < 1.0 {
                    if !(g > BRACKET_FLOOR) {
                        return None;
                    }
                } else if !(g > 0.0) {
                    continue;
                }
                let u = (beta * g.ln()).exp();
                weights[x] = u;
                curv[x] = u / g;
                psi += u * g;
            }
            psi / a
        }
        Model::Kl => {
            let logs: Vec<f64> = q.iter().zip(&shift).map(|(qx, s)| qx.ln() - s).collect();
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut s = 0.0;
            for x in 0..q.len() {
                weights[x] = (logs[x] - m).exp();
                s += weights[x];
            }
            // Curvature of the log-partition is the covariance under the tilt.
            for x in 0..q.len() {
                curv[x] = weights[x] / s;
            }
            m + s.ln()
        }
    };
    if !psi.is_finite()
        || weights.iter().all(|&u| u == 0.0)
        || weights.iter().any(|u| !u.is_finite())
    {
        return None;
    }
    let mut grad = vec![0.0; k];
    let mut hess = vec![vec![0.0; k]; k];
    for (i, fi) in family.rows().iter().enumerate() {
        grad[i] = -linalg::dot(&weights, fi);
        for (j, fj) in family.rows().iter().enumerate().take(i + 1) {
            let h: f64 = (0..q.len()).map(|x| curv[x] * fi[x] * fj[x]).sum();
            hess[i][j] = h;
            hess[j][i] = h;
        }
    }
    if let Model::Kl = model {
        let s: f64 = weights.iter().sum();
        for g in grad.iter_mut() {
            *g /= s;
        }
        for i in 0..k {
            for j in 0..k {
                hess[i][j] -= grad[i] * grad[j];
            }
        }
    }
    Some(DualPoint {
        psi,
        weights,
        grad,
        hess,
    })
}

/// Moment residual of the normalized weights, scaled per row by `max(1, |f_i|_inf)`.
pub(crate) fn moment_residual(weights: &[f64], family: &LinearFamily) -> f64 {
    let s: f64 = weights.iter().sum();
    family
        .rows()
        .iter()
        .map(|f| (linalg::dot(weights, f) / s).abs() / linalg::norm_inf(f).max(1.0))
        .fold(0.0, f64::max)
}

/// Regularized Newton direction; falls back to steepest descent.
fn newton_direction(pt: &DualPoint) -> Vec<f64> {
    let k = pt.grad.len();
    let neg: Vec<f64> = pt.grad.iter().map(|g| -g).collect();
    let trace: f64 = (0..k)
        .map(|i| pt.hess[i][i])
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let mut mu = 0.0;
    for _ in 0..8 {
        let mut h = pt.hess.clone();
        for (i, row) in h.iter_mut().enumerate() {
            row[i] += mu;
        }
        if let Some(d) = linalg::solve(&h, &neg) {
            if linalg::dot(&d, &pt.grad) < 0.0 {
                return d;
            }
        }
        mu = if mu == 0.0 {
            1e-12 * trace / k as f64
        } else {
            mu * 100.0
        };
    }
    neg
}

/// Damped Newton from `theta0`.
///
/// Runs until the moment residual stops improving or falls below `1e-15`; the
/// caller decides what counts as converged.
pub(crate) fn solve(
    model: Model,
    q: &[f64],
    family: &LinearFamily,
    theta0: &[f64],
    max_iter: usize,
) -> Option<DualSolution> {
    let mut theta = theta0.to_vec();
    let mut pt = evaluate(model, q, family, &theta)?;
    let mut residual = moment_residual(&pt.weights, family);
    let mut best = (theta.clone(), pt.weights.clone(), residual);
    let mut iterations = 0;
    let mut stalls = 0;
    while iterations < max_iter && best.2 > 1e-15 && family.k() > 0 {
        iterations += 1;
        let d = newton_direction(&pt);
        let slope = linalg::dot(&d, &pt.grad);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = theta.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if let Some(next) = evaluate(model, q, family, &trial) {
                let armijo =
                    next.psi <= pt.psi + 1e-4 * t * slope + 4.0 * f64::EPSILON * pt.psi.abs();
                let r = moment_residual(&next.weights, family);
                if armijo || r < 0.5 * residual {
                    accepted = Some((trial, next, r));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, next, r)) = accepted else {
            break;
        };
        theta = trial;
        pt = next;
        residual = r;
        if residual < best.2 {
            best = (theta.clone(), pt.weights.clone(), residual);
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= 5 {
                break;
            }
        }
    }
    let (theta, weights, residual) = best;
    let z: f64 = weights.iter().sum();
    Some(DualSolution {
        p: weights.iter().map(|u| u / z).collect(),
        z,
        theta,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_multiplier() {
        let fam = LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap();
        let sol = solve(Model::Power(2.0), &[0.25; 4], &fam, &[0.0], 200).unwrap();
        assert!((sol.theta[0] + 0.05).abs() < 1e-12, "{:?}", sol.theta);
        assert!((sol.z - 0.4).abs() < 1e-12);
        let expect = [0.75, 0.25, 0.0, 0.0];
        for (p, e) in sol.p.iter().zip(expect) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let fam = LinearFamily::new(3, vec![vec![-1.0, 0.2, 1.0]]).unwrap();
        let q = [0.5, 0.3, 0.2];
        for model in [Model::Power(0.5), Model::Power(3.0), Model::Kl] {
            let th = [0.1];
            let pt = evaluate(model, &q, &fam, &th).unwrap();
            let h = 1e-6;
            let up = evaluate(model, &q, &fam, &[th[0] + h]).unwrap().psi;
            let dn = evaluate(model, &q, &fam, &[th[0] - h]).unwrap().psi;
            let fd = (up - dn) / (2.0 * h);
            assert!(
                (fd - pt.grad[0]).abs() < 1e-6,
                "{model:?}: {fd} vs {}",
                pt.grad[0]
            );
            let gu = evaluate(model, &q, &fam, &[th[0] + h]).unwrap().grad[0];
            let gd = evaluate(model, &q, &fam, &[th[0] - h]).unwrap().grad[0];
            let fdh = (gu - gd) / (2.0 * h);
            assert!(
                (fdh - pt.hess[0][0]).abs() < 1e-5,
                "{model:?}: {fdh} vs {}",
                pt.hess[0][0]
            );
        }
    }
}

//! The minimizer of `I_a(., Q)` over a linear family.
//!
//! For `a < 1` the projection has full support on `Supp(L)` and an unclipped
//! power-law form, so the multipliers are found directly by Newton's method.
//! For `a >= 1` the active support is unknown, so projected gradient descent
//! locates it and a Newton pass on the multipliers sharpens the result.

mod certificate;
mod descent;
mod dual;
mod pythagorean;

pub use certificate::{
    certify_power_law, default_fit_tolerance, evaluate_certificate, Certificate, SIGN_TOL,
};
pub use pythagorean::{
    check_report, pythagorean_gap, pythagorean_report, verify_projection, PythagoreanReport,
    PythagoreanSample, GAP_TOL, OPTIMALITY_TOL,
};

use crate::distribution::{Alpha, Distribution};
use crate::divergence::alpha_entropy_of_weights;
use crate::error::{Error, Result};
use crate::family::LinearFamily;
use crate::feasibility::{family_support, feasible_point};

use dual::Model;

/// Moment residual at which the multiplier solve counts as converged.
pub const MOMENT_TOL: f64 = 1e-9;

/// For `a > 1`, masses below this are clipped to zero before certification.
/// A bracket that vanishes exactly in theory leaves roundoff-sized mass behind.
pub const ZERO_MASS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Parametric,
    Descent,
    Oracle,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Parametric => "parametric",
            SolverKind::Descent => "descent",
            SolverKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Parametric,
    Descent,
}

#[derive(Debug, Clone)]
pub struct ProjectOptions {
    pub solver: SolverChoice,
    pub newton_max_iter: usize,
    pub descent_max_iter: usize,
    /// Refine descent output with a Newton solve on the multipliers.
    pub polish: bool,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        Self {
            solver: SolverChoice::Auto,
            newton_max_iter: 200,
            descent_max_iter: 100_000,
            polish: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub p_star: Distribution,
    /// One multiplier per family row.
    pub theta: Vec<f64>,
    pub z: f64,
    pub divergence: f64,
    pub iterations: usize,
    pub solver: SolverKind,
    pub converged: bool,
    /// The parametric solver failed and descent produced this result.
    pub fallback: bool,
    pub certificate: Option<Certificate>,
}

/// The family and reference restricted to a subset of symbols.
struct Restriction {
    symbols: Vec<usize>,
    family: LinearFamily,
    /// Original row index of each restricted row.
    kept: Vec<usize>,
    q: Vec<f64>,
}

impl Restriction {
    fn new(q: &Distribution, family: &LinearFamily, symbols: Vec<usize>) -> Self {
        let (sub, kept) = family.restrict(&symbols);
        let qs = symbols.iter().map(|&x| q.weights()[x]).collect();
        Self {
            symbols,
            family: sub,
            kept,
            q: qs,
        }
    }

    fn embed(&self, n: usize, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&x, &v) in self.symbols.iter().zip(values) {
            out[x] = v;
        }
        out
    }

    fn lift_theta(&self, k: usize, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; k];
        for (&i, &t) in self.kept.iter().zip(theta) {
            out[i] = t;
        }
        out
    }

    fn lower_theta(&self, theta: &[f64]) -> Vec<f64> {
        self.kept.iter().map(|&i| theta[i]).collect()
    }
}

fn check_problem(q: &Distribution, family: &LinearFamily) -> Result<Vec<usize>> {
    if q.len() != family.n() {
        return Err(Error::DimensionMismatch {
            expected: family.n(),
            found: q.len(),
        });
    }
    if let Some(index) = (0..q.len()).find(|&x| q.weights()[x] <= 0.0) {
        return Err(Error::QNotFullSupport { index });
    }
    Ok(family_support(family)?.indices)
}

fn divergence_of(p: &[f64], q: &Distribution, alpha: Alpha) -> f64 {
    alpha_entropy_of_weights(p, q.weights(), alpha).map_or(f64::INFINITY, |v| v.value())
}

/// Projects `q` onto `family`.
///
/// With [`SolverChoice::Auto`], `a < 1` goes to [`project_parametric`] and
/// everything else to [`project_descent`]. The result always carries a
/// power-law certificate when one can be computed.
pub fn project(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    opts: &ProjectOptions,
) -> Result<ProjectionResult> {
    let support = check_problem(q, family)?;
    let parametric = match opts.solver {
        SolverChoice::Auto => alpha.below_one(),
        SolverChoice::Parametric => true,
        SolverChoice::Descent => false,
    };
    if parametric {
        parametric_impl(q, family, alpha, opts, support)
    } else {
        descent_impl(q, family, alpha, opts, support)
    }
}

/// Newton's method on the multipliers of the unclipped power law. Requires `a < 1`.
///
/// Falls back to descent (and sets `fallback`) when the moment residual does
/// not reach [`MOMENT_TOL`] within `newton_max_iter` iterations.
pub fn project_parametric(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
) -> Result<ProjectionResult> {
    let opts = ProjectOptions {
        solver: SolverChoice::Parametric,
        ..ProjectOptions::default()
    };
    project(q, family, alpha, &opts)
}

/// Projected gradient descent, polished by a multiplier solve.
pub fn project_descent(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
) -> Result<ProjectionResult> {
    let opts = ProjectOptions {
        solver: SolverChoice::Descent,
        ..ProjectOptions::default()
    };
    project(q, family, alpha, &opts)
}

fn parametric_impl(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    opts: &ProjectOptions,
    support: Vec<usize>,
) -> Result<ProjectionResult> {
    if !alpha.below_one() {
        return Err(Error::InvalidArgument(format!(
            "the parametric solver needs alpha < 1, got {}",
            alpha.value()
        )));
    }
    let r = Restriction::new(q, family, support.clone());
    let theta0 = vec![0.0; r.family.k()];
    let sol = dual::solve(
        Model::Power(alpha.value()),
        &r.q,
        &r.family,
        &theta0,
        opts.newton_max_iter,
    );
    match sol {
        Some(sol) if sol.residual <= MOMENT_TOL => {
            let p = r.embed(family.n(), &sol.p);
            let theta = r.lift_theta(family.k(), &sol.theta);
            Ok(finish(
                q,
                family,
                alpha,
                Solved {
                    p,
                    theta,
                    z: sol.z,
                    iterations: sol.iterations,
                    solver: SolverKind::Parametric,
                    converged: true,
                    hint: true,
                },
            ))
        }
        _ => {
            let mut res = descent_impl(q, family, alpha, opts, support)?;
            res.fallback = true;
            Ok(res)
        }
    }
}

struct Solved {
    p: Vec<f64>,
    theta: Vec<f64>,
    z: f64,
    iterations: usize,
    solver: SolverKind,
    converged: bool,
    /// `theta` and `z` come from the solver rather than the fit.
    hint: bool,
}

/// Computes divergence and certificate; fills in multipliers from the fit when the solver has none.
fn finish(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    mut s: Solved,
) -> ProjectionResult {
    if alpha.above_one() {
        s.p.iter_mut()
            .filter(|w| **w < ZERO_MASS)
            .for_each(|w| *w = 0.0);
    }
    let p_star = Distribution::from_nonnegative(&s.p);
    let divergence = divergence_of(p_star.weights(), q, alpha);
    let mut certificate = certify_power_law(&p_star, q, family, alpha).ok();
    if s.hint {
        if let Some(c) = &certificate {
            if c.degenerate {
                if let Ok(alt) = evaluate_certificate(&p_star, q, family, alpha, &s.theta, s.z) {
                    certificate = Some(alt);
                }
            }
        }
    }
    let (theta, z) = match (&certificate, s.hint) {
        (_, true) | (None, false) => (s.theta, s.z),
        (Some(c), false) => (c.theta.clone(), c.z),
    };
    ProjectionResult {
        p_star,
        theta,
        z,
        divergence,
        iterations: s.iterations,
        solver: s.solver,
        converged: s.converged,
        fallback: false,
        certificate,
    }
}

fn descent_impl(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    opts: &ProjectOptions,
    support: Vec<usize>,
) -> Result<ProjectionResult> {
    let n = family.n();
    let r = Restriction::new(q, family, support);
    let start_full = if family.contains(q) {
        q.clone()
    } else {
        feasible_point(family, true)?
    };
    let start: Vec<f64> = r.symbols.iter().map(|&x| start_full.weights()[x]).collect();
    let out = descent::descend(&r.q, &r.family, alpha, &start, opts.descent_max_iter);
    let p = r.embed(n, &out.p);
    let objective = divergence_of(&p, q, alpha);

    let mut solved = Solved {
        p,
        theta: vec![0.0; family.k()],
        z: 1.0,
        iterations: out.iterations,
        solver: SolverKind::Descent,
        converged: out.converged,
        hint: false,
    };
    if opts.polish && family.k() > 0 {
        if let Some(better) = polish(q, family, alpha, opts, &r, &solved.p, objective) {
            solved.iterations += better.iterations;
            solved.p = better.p;
            solved.theta = better.theta;
            solved.z = better.z;
            solved.converged = true;
            solved.hint = true;
        }
    }
    let result = finish(q, family, alpha, solved);
    if !result.converged {
        return Err(Error::NoConvergence {
            iterations: result.iterations,
            residual: out.pg_norm,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// A multiplier solve warm-started from the fit at the descent iterate.
///
/// For `a > 1` it runs on the full alphabet so the clip can switch symbols off;
/// otherwise on `Supp(L)`. Accepted only if it converges and does not raise the
/// objective.
fn polish(
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    opts: &ProjectOptions,
    r: &Restriction,
    p: &[f64],
    objective: f64,
) -> Option<Solved> {
    let n = family.n();
    let full;
    let (chart, model) = if alpha.above_one() {
        full = Restriction::new(q, family, (0..n).collect());
        (&full, Model::Power(alpha.value()))
    } else if alpha.is_kl() {
        (r, Model::Kl)
    } else {
        (r, Model::Power(alpha.value()))
    };
    let fit = certify_power_law(&Distribution::from_nonnegative(p), q, family, alpha)
        .ok()
        .filter(|c| c.theta.iter().all(|t| t.is_finite()));
    let warm = fit.map(|c| chart.lower_theta(&c.theta));
    let zero = vec![0.0; chart.family.k()];
    let sol = warm
        .as_deref()
        .and_then(|t| dual::solve(model, &chart.q, &chart.family, t, opts.newton_max_iter))
        .filter(|s| s.residual <= MOMENT_TOL)
        .or_else(|| dual::solve(model, &chart.q, &chart.family, &zero, opts.newton_max_iter))
        .filter(|s| s.residual <= MOMENT_TOL)?;
    let p_new = chart.embed(n, &sol.p);
    if divergence_of(&p_new, q, alpha) > objective + 1e-9 {
        return None;
    }
    let z = match model {
        Model::Power(_) => sol.z,
        Model::Kl => {
            let shift = chart.family.combine(&sol.theta);
            chart
                .q
                .iter()
                .zip(&shift)
                .map(|(qx, s)| qx * (-s).exp())
                .sum()
        }
    };
    Some(Solved {
        p: p_new,
        theta: chart.lift_theta(family.k(), &sol.theta),
        z,
        iterations: sol.iterations,
        solver: SolverKind::Descent,
        converged: true,
        hint: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample() -> LinearFamily {
        LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap()
    }

    #[test]
    fn counterexample_projection() {
        let res = project(
            &Distribution::uniform(4),
            &counterexample(),
            Alpha::new(2.0).unwrap(),
            &ProjectOptions::default(),
        )
        .unwrap();
        let target = Distribution::new(&[0.75, 0.25, 0.0, 0.0]).unwrap();
        assert!(res.p_star.max_abs_diff(&target) <= 1e-9, "{:?}", res.p_star);
        assert!((res.theta[0] + 0.05).abs() < 1e-10);
        assert!((res.z - 0.4).abs() < 1e-10);
        let cert = res.certificate.unwrap();
        assert!((cert.theta[0] + 0.05).abs() < 1e-10);
        assert_eq!(res.p_star.support(), &[0, 1]);
    }

    #[test]
    fn reference_inside_family_is_fixed() {
        let q = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let fam = LinearFamily::new(3, vec![vec![-0.2, 0.0, 0.5]]).unwrap();
        assert!(fam.contains(&q));
        for a in [0.5, 1.0, 2.0] {
            let alpha = Alpha::new(a).unwrap();
            let res = project(&q, &fam, alpha, &ProjectOptions::default()).unwrap();
            assert!(res.p_star.max_abs_diff(&q) < 1e-12, "{a}: {:?}", res.p_star);
            assert!(res.theta.iter().all(|t| t.abs() < 1e-10));
            assert!(res.divergence.abs() < 1e-12);
        }
        let res = project_descent(&q, &fam, Alpha::new(2.0).unwrap()).unwrap();
        assert!(res.iterations <= 1);
    }

    #[test]
    fn parametric_and_descent_agree() {
        let q = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let fam = LinearFamily::new(3, vec![vec![-1.0, 0.0, 1.0]]).unwrap();
        let alpha = Alpha::new(0.5).unwrap();
        let a = project_parametric(&q, &fam, alpha).unwrap();
        let raw = ProjectOptions {
            solver: SolverChoice::Descent,
            polish: false,
            ..ProjectOptions::default()
        };
        let b = project(&q, &fam, alpha, &raw).unwrap();
        assert_eq!(a.solver, SolverKind::Parametric);
        assert!(!a.fallback);
        let w = a.p_star.weights();
        assert!((w[0] - w[2]).abs() < 1e-12);
        assert!(
            a.p_star.max_abs_diff(&b.p_star) <= 1e-7,
            "{:?} vs {:?}",
            a.p_star,
            b.p_star
        );
    }

    #[test]
    fn unconstrained_parametric_returns_reference() {
        let q = Distribution::new(&[0.1, 0.6, 0.3]).unwrap();
        let res = project_parametric(
            &q,
            &LinearFamily::unconstrained(3),
            Alpha::new(0.5).unwrap(),
        )
        .unwrap();
        assert!(res.theta.is_empty());
        assert!(res.p_star.max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn kl_matches_gibbs_tilt() {
        // Mean constraint sum P(x) x = 1.2 on {0, 1, 2, 3} from uniform.
        let fam = crate::family::homogenize(4, &[(vec![0.0, 1.0, 2.0, 3.0], 1.2)]).unwrap();
        let res =
            project_descent(&Distribution::uniform(4), &fam, Alpha::new(1.0).unwrap()).unwrap();
        let mean = |t: f64| {
            let w: Vec<f64> = (0..4).map(|x| (-t * x as f64).exp()).collect();
            let s: f64 = w.iter().sum();
            (0..4).map(|x| x as f64 * w[x] / s).sum::<f64>()
        };
        let (mut lo, mut hi) = (-20.0, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mean(mid) > 1.2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let w: Vec<f64> = (0..4).map(|x| (-t * x as f64).exp()).collect();
        let s: f64 = w.iter().sum();
        for (p, wx) in res.p_star.weights().iter().zip(&w) {
            assert!((p - wx / s).abs() < 1e-9, "{:?}", res.p_star);
        }
    }

    #[test]
    fn wrong_solver_for_alpha() {
        let err = project_parametric(
            &Distribution::uniform(4),
            &counterexample(),
            Alpha::new(2.0).unwrap(),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let q = Distribution::new(&[0.5, 0.5, 0.0]).unwrap();
        let err = project_descent(
            &q,
            &LinearFamily::unconstrained(3),
            Alpha::new(2.0).unwrap(),
        );
        assert!(matches!(err, Err(Error::QNotFullSupport { index: 2 })));
    }
}

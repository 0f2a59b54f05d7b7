//! Pythagorean gaps `I(P,Q) - I(P,P*) - I(P*,Q)` over samples of the family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ProjectionResult;
use crate::distribution::{Alpha, Distribution};
use crate::divergence::{relative_alpha_entropy, DivergenceValue};
use crate::error::{Error, Result};
use crate::family::LinearFamily;
use crate::sampling::MemberSampler;

/// Allowed deviation of a gap from its sign or equality condition.
pub const GAP_TOL: f64 = 1e-7;
/// Allowed excess of `I(P*,Q)` over `I(P,Q)` for a sampled member `P`.
pub const OPTIMALITY_TOL: f64 = 1e-9;

/// `I(P,Q) - I(P,P*) - I(P*,Q)`.
///
/// An infinite term makes the gap infinite with the matching sign.
pub fn pythagorean_gap(
    p: &Distribution,
    pstar: &Distribution,
    q: &Distribution,
    alpha: Alpha,
) -> Result<f64> {
    let lhs = relative_alpha_entropy(p, q, alpha)?;
    let a = relative_alpha_entropy(p, pstar, alpha)?;
    let b = relative_alpha_entropy(pstar, q, alpha)?;
    let rhs_inf = a.is_infinite() || b.is_infinite();
    match (lhs, rhs_inf) {
        (DivergenceValue::Infinite, true) => Err(Error::Indeterminate),
        (DivergenceValue::Infinite, false) => Ok(f64::INFINITY),
        (_, true) => Ok(f64::NEG_INFINITY),
        (l, false) => Ok(l.value() - a.value() - b.value()),
    }
}

#[derive(Debug, Clone)]
pub struct PythagoreanSample {
    pub p: Distribution,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct PythagoreanReport {
    pub samples: Vec<PythagoreanSample>,
    /// `I(P*, Q)`.
    pub projection_value: f64,
}

impl PythagoreanReport {
    pub fn min_gap(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.gap)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_gap(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.gap)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Gaps at `n_samples` seeded random members of `family`.
pub fn pythagorean_report(
    pstar: &Distribution,
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    n_samples: usize,
    seed: u64,
) -> Result<PythagoreanReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample is required".into(),
        ));
    }
    let sampler = MemberSampler::new(family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let projection_value = relative_alpha_entropy(pstar, q, alpha)?.value();
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let p = sampler.sample(&mut rng);
        let gap = pythagorean_gap(&p, pstar, q, alpha)?;
        let lhs = relative_alpha_entropy(&p, q, alpha)?.value();
        samples.push(PythagoreanSample {
            rhs: lhs - gap,
            lhs,
            gap,
            p,
        });
    }
    Ok(PythagoreanReport {
        samples,
        projection_value,
    })
}

/// Indices of samples that break the gap condition or beat the projection.
///
/// For `a <= 1` the gap must vanish; for `a > 1` it must be nonnegative.
pub fn check_report(report: &PythagoreanReport, alpha: Alpha) -> Vec<usize> {
    let equality = !alpha.above_one();
    report
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let gap_ok = if equality {
                s.gap.abs() <= GAP_TOL
            } else {
                s.gap >= -GAP_TOL
            };
            let optimal = s.lhs >= report.projection_value - OPTIMALITY_TOL;
            !(gap_ok && optimal)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Samples the family and checks the Pythagorean relation at every sample.
pub fn verify_projection(
    result: &ProjectionResult,
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    n_samples: usize,
    seed: u64,
) -> Result<PythagoreanReport> {
    let report = pythagorean_report(&result.p_star, q, family, alpha, n_samples, seed)?;
    let violations = check_report(&report, alpha);
    if violations.is_empty() {
        Ok(report)
    } else {
        Err(Error::VerificationFailed {
            total: n_samples,
            violations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{project, ProjectOptions};

    fn counterexample() -> LinearFamily {
        LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap()
    }

    #[test]
    fn quoted_pair() {
        let alpha = Alpha::new(2.0).unwrap();
        let q = Distribution::uniform(4);
        let p = Distribution::new(&[0.8227, 0.0625, 0.0536, 0.0612]).unwrap();
        let pstar = Distribution::new(&[0.75, 0.25, 0.0, 0.0]).unwrap();
        let gap = pythagorean_gap(&p, &pstar, &q, alpha).unwrap();
        let lhs = relative_alpha_entropy(&p, &q, alpha).unwrap().value();
        assert!((lhs - 1.0114).abs() < 5e-5, "{lhs}");
        assert!((lhs - gap - 0.9871).abs() < 5e-5, "{}", lhs - gap);
        assert_eq!(pythagorean_gap(&pstar, &pstar, &q, alpha).unwrap(), 0.0);
    }

    #[test]
    fn infinite_terms() {
        let alpha = Alpha::new(0.5).unwrap();
        let q = Distribution::new(&[0.5, 0.5, 0.0]).unwrap();
        let p = Distribution::new(&[0.0, 0.5, 0.5]).unwrap();
        let ps = Distribution::new(&[0.5, 0.5, 0.0]).unwrap();
        assert!(matches!(
            pythagorean_gap(&p, &ps, &q, alpha),
            Err(Error::Indeterminate)
        ));
        assert_eq!(
            pythagorean_gap(&ps, &p, &q, alpha).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn counterexample_strict_inequality() {
        let alpha = Alpha::new(2.0).unwrap();
        let q = Distribution::uniform(4);
        let fam = counterexample();
        let res = project(&q, &fam, alpha, &ProjectOptions::default()).unwrap();
        let report = verify_projection(&res, &q, &fam, alpha, 1000, 0).unwrap();
        assert!(report.min_gap() >= -GAP_TOL);
        assert!(report.max_gap() > 1e-3);
    }

    #[test]
    fn equality_below_one() {
        let alpha = Alpha::new(0.5).unwrap();
        let q = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let fam = LinearFamily::new(3, vec![vec![-1.0, 0.0, 1.0]]).unwrap();
        let res = project(&q, &fam, alpha, &ProjectOptions::default()).unwrap();
        let report = verify_projection(&res, &q, &fam, alpha, 100, 0).unwrap();
        assert!(report.samples.iter().all(|s| s.gap.abs() <= 1e-8));
    }

    #[test]
    fn wrong_candidate_fails() {
        let alpha = Alpha::new(0.5).unwrap();
        let q = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let fam = LinearFamily::new(3, vec![vec![-1.0, 0.0, 1.0]]).unwrap();
        let mut res = project(&q, &fam, alpha, &ProjectOptions::default()).unwrap();
        res.p_star = Distribution::new(&[0.3, 0.4, 0.3]).unwrap();
        assert!(matches!(
            verify_projection(&res, &q, &fam, alpha, 50, 0),
            Err(Error::VerificationFailed { total: 50, .. })
        ));
    }
}

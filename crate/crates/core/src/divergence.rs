//! Shannon and Rényi entropies, Kullback-Leibler divergence and the relative
//! alpha-entropy
//!
//! ```text
//! I_a(P, Q) = a/(1-a) log sum P Q^(a-1) - 1/(1-a) log sum P^a + log sum Q^a
//! ```
//!
//! together with its gradient in the first argument. All logarithms are natural.
//!
//! The value is infinite when `a < 1` and `Supp(P)` is not inside `Supp(Q)`, or
//! when `a > 1` and the supports are disjoint. Sums run over the indices where
//! the summand is positive, so `0 * inf` never occurs.

use crate::distribution::{Alpha, Distribution};
use crate::error::{Error, Result};

/// A divergence in nats, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceValue {
    Finite(f64),
    Infinite,
}

impl DivergenceValue {
    /// Clips roundoff-level negatives (the quantity is nonnegative by construction).
    fn finite(v: f64) -> Self {
        DivergenceValue::Finite(v.max(0.0))
    }

    pub fn value(self) -> f64 {
        match self {
            DivergenceValue::Finite(v) => v,
            DivergenceValue::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, DivergenceValue::Infinite)
    }
}

impl std::fmt::Display for DivergenceValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceValue::Finite(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            DivergenceValue::Infinite => f.write_str("inf"),
        }
    }
}

fn check_dims(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `x^e` for `x > 0`, computed through the logarithm.
#[inline]
fn pow(x: f64, e: f64) -> f64 {
    (e * x.ln()).exp()
}

pub fn shannon_entropy(p: &Distribution) -> f64 {
    -p.weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| w * w.ln())
        .sum::<f64>()
}

/// `1/(1-a) log sum P^a`, or the Shannon entropy on the KL branch.
pub fn renyi_entropy(p: &Distribution, alpha: Alpha) -> f64 {
    if alpha.is_kl() {
        return shannon_entropy(p);
    }
    let a = alpha.value();
    let s: f64 = p
        .weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| pow(w, a))
        .sum();
    s.ln() / (1.0 - a)
}

pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<DivergenceValue> {
    kl_of_weights(p.weights(), q.weights())
}

/// KL divergence of `p / sum(p)` from `q`; `p` need not be normalized.
pub fn kl_of_weights(p: &[f64], q: &[f64]) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let total: f64 = p.iter().filter(|&&w| w > 0.0).sum();
    let mut acc = 0.0;
    for (&pw, &qw) in p.iter().zip(q) {
        if pw > 0.0 {
            if qw <= 0.0 {
                return Ok(DivergenceValue::Infinite);
            }
            let pn = pw / total;
            acc += pn * (pn / qw).ln();
        }
    }
    Ok(DivergenceValue::finite(acc))
}

pub fn relative_alpha_entropy(
    p: &Distribution,
    q: &Distribution,
    alpha: Alpha,
) -> Result<DivergenceValue> {
    alpha_entropy_of_weights(p.weights(), q.weights(), alpha)
}

/// Relative alpha-entropy on raw nonnegative weights.
///
/// The expression is invariant under rescaling of `p`, so `p` need not sum
/// to one. This is the form used for finite-difference checks. `q` is taken as
/// given.
pub fn alpha_entropy_of_weights(p: &[f64], q: &[f64], alpha: Alpha) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    if alpha.is_kl() {
        return kl_of_weights(p, q);
    }
    let a = alpha.value();
    let mut cross = 0.0;
    let mut p_pow = 0.0;
    let mut q_pow = 0.0;
    let mut overlap = false;
    for (&pw, &qw) in p.iter().zip(q) {
        if pw > 0.0 && qw > 0.0 {
            overlap = true;
            cross += pw * pow(qw, a - 1.0);
        } else if pw > 0.0 && a < 1.0 {
            return Ok(DivergenceValue::Infinite);
        }
        if pw > 0.0 {
            p_pow += pow(pw, a);
        }
        if qw > 0.0 {
            q_pow += pow(qw, a);
        }
    }
    if !overlap {
        return Ok(DivergenceValue::Infinite);
    }
    let v = a / (1.0 - a) * cross.ln() - p_pow.ln() / (1.0 - a) + q_pow.ln();
    Ok(DivergenceValue::finite(v))
}

/// Partial derivatives of `P -> I_a(P, Q)` on the positive orthant.
///
/// ```text
/// d/dP(x) = a/(1-a) [ Q(x)^(a-1) / sum P Q^(a-1) - P(x)^(a-1) / sum P^a ]
/// ```
///
/// For `a < 1` a coordinate with `P(x) = 0 < Q(x)` is `-inf`; coordinates
/// outside `Supp(Q)` are `NaN`. For `a > 1` every coordinate is finite. On the
/// KL branch this returns the limit `log(P(x)/Q(x)) - KL(P||Q)`.
pub fn alpha_gradient(p: &Distribution, q: &Distribution, alpha: Alpha) -> Result<Vec<f64>> {
    alpha_gradient_of_weights(p.weights(), q.weights(), alpha)
}

pub fn alpha_gradient_of_weights(p: &[f64], q: &[f64], alpha: Alpha) -> Result<Vec<f64>> {
    check_dims(p, q)?;
    if p.iter().zip(q).any(|(&pw, &qw)| pw > 0.0 && qw <= 0.0) && !alpha.above_one() {
        return Err(Error::UndefinedGradient(
            "Supp(P) is not contained in Supp(Q)",
        ));
    }
    if alpha.is_kl() {
        let kl = kl_of_weights(p, q)?.value();
        let total: f64 = p.iter().filter(|&&w| w > 0.0).sum();
        return Ok(p
            .iter()
            .zip(q)
            .map(|(&pw, &qw)| {
                if qw <= 0.0 {
                    f64::NAN
                } else if pw <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (pw / total / qw).ln() - kl
                }
            })
            .collect());
    }
    let a = alpha.value();
    let cross: f64 = p
        .iter()
        .zip(q)
        .filter(|(&pw, &qw)| pw > 0.0 && qw > 0.0)
        .map(|(&pw, &qw)| pw * pow(qw, a - 1.0))
        .sum();
    let p_pow: f64 = p.iter().filter(|&&w| w > 0.0).map(|&w| pow(w, a)).sum();
    if cross <= 0.0 {
        return Err(Error::UndefinedGradient("sum P Q^(a-1) vanishes"));
    }
    if p_pow <= 0.0 {
        return Err(Error::UndefinedGradient("sum P^a vanishes"));
    }
    let c = a / (1.0 - a);
    Ok(p.iter()
        .zip(q)
        .map(|(&pw, &qw)| {
            let q_term = if qw > 0.0 {
                pow(qw, a - 1.0)
            } else if a > 1.0 {
                0.0
            } else {
                return f64::NAN;
            };
            let p_term = if pw > 0.0 {
                pow(pw, a - 1.0)
            } else if a > 1.0 {
                0.0
            } else {
                return f64::NEG_INFINITY;
            };
            c * (q_term / cross - p_term / p_pow)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(w: &[f64]) -> Distribution {
        Distribution::new(w).unwrap()
    }

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn shannon_values() {
        assert!((shannon_entropy(&Distribution::uniform(4)) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(shannon_entropy(&d(&[1.0, 0.0, 0.0])), 0.0);
        assert!((shannon_entropy(&d(&[0.25, 0.75])) - 0.562_335_144_618_808_3).abs() < 1e-12);
    }

    #[test]
    fn renyi_values() {
        for a in [0.3, 0.5, 2.0, 7.0] {
            let h = renyi_entropy(&Distribution::uniform(5), alpha(a));
            assert!((h - 5f64.ln()).abs() < 1e-12);
        }
        let h = renyi_entropy(&d(&[0.25, 0.75]), alpha(0.5));
        assert!((h - 0.623_810_716_364_871_3).abs() < 1e-12);
        let p = d(&[0.1, 0.2, 0.7]);
        for a in [1.0 - 1e-12, 1.0 + 1e-12] {
            assert_eq!(renyi_entropy(&p, alpha(a)), shannon_entropy(&p));
        }
    }

    #[test]
    fn kl_values() {
        let p = d(&[0.5, 0.5]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), DivergenceValue::Finite(0.0));
        assert!(kl_divergence(&d(&[1.0, 0.0]), &d(&[0.0, 1.0]))
            .unwrap()
            .is_infinite());
        let v = kl_divergence(&p, &d(&[0.25, 0.75])).unwrap().value();
        assert!((v - 0.143_841_036_225_890_4).abs() < 1e-12);
        assert!(matches!(
            kl_divergence(&p, &Distribution::uniform(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn counterexample_lhs() {
        let p = d(&[0.8227, 0.0625, 0.0536, 0.0612]);
        let v = relative_alpha_entropy(&p, &Distribution::uniform(4), alpha(2.0))
            .unwrap()
            .value();
        assert!((v - 1.0114).abs() <= 5e-5, "{v}");
    }

    #[test]
    fn alpha_entropy_special_cases() {
        let p = d(&[0.2, 0.3, 0.5]);
        for a in [0.3, 0.5, 2.0, 4.0] {
            assert_eq!(
                relative_alpha_entropy(&p, &p, alpha(a)).unwrap().value(),
                0.0
            );
        }
        let (x, y) = (d(&[1.0, 0.0]), d(&[0.0, 1.0]));
        assert!(relative_alpha_entropy(&x, &y, alpha(0.5))
            .unwrap()
            .is_infinite());
        assert!(relative_alpha_entropy(&x, &y, alpha(2.0))
            .unwrap()
            .is_infinite());
        // Partial overlap is finite for a > 1 but infinite for a < 1.
        let (x, y) = (d(&[0.5, 0.5, 0.0]), d(&[0.0, 0.5, 0.5]));
        assert!(relative_alpha_entropy(&x, &y, alpha(0.5))
            .unwrap()
            .is_infinite());
        assert!(!relative_alpha_entropy(&x, &y, alpha(2.0))
            .unwrap()
            .is_infinite());
        // 0.5 log(1 + 1/sqrt 3) + ... evaluated independently: 0.0745045720308164.
        let v = relative_alpha_entropy(&d(&[0.5, 0.5]), &d(&[0.25, 0.75]), alpha(0.5))
            .unwrap()
            .value();
        assert!((v - 0.074_504_572_030_816_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn gradient_vanishes_at_reference() {
        let u = Distribution::uniform(5);
        for a in [0.3, 0.7, 1.0, 1.5, 3.0] {
            let g = alpha_gradient(&u, &u, alpha(a)).unwrap();
            assert!(g.iter().all(|x| x.abs() < 1e-12), "{a}: {g:?}");
        }
    }

    #[test]
    fn gradient_boundary_conventions() {
        let g =
            alpha_gradient(&d(&[0.5, 0.5, 0.0]), &Distribution::uniform(3), alpha(0.5)).unwrap();
        assert!(g[2] == f64::NEG_INFINITY);
        assert!(g[0].is_finite() && g[1].is_finite());
        let g = alpha_gradient(
            &d(&[0.75, 0.25, 0.0, 0.0]),
            &Distribution::uniform(4),
            alpha(2.0),
        )
        .unwrap();
        assert!(g.iter().all(|x| x.is_finite()));
        assert!(matches!(
            alpha_gradient(&d(&[1.0, 0.0]), &d(&[0.0, 1.0]), alpha(0.5)),
            Err(Error::UndefinedGradient(_))
        ));
        assert!(matches!(
            alpha_gradient(&d(&[1.0, 0.0]), &d(&[0.0, 1.0]), alpha(2.0)),
            Err(Error::UndefinedGradient(_))
        ));
    }
}

//! Power-law certificates.
//!
//! A member `P` of the family is the projection of `Q` iff, for some `theta`
//! and `Z > 0`,
//!
//! ```text
//! Z^(a-1) P(x)^(a-1) = Q(x)^(a-1) + (1-a) theta . f(x)      on Supp(P)
//!                  0 >= Q(x)^(a-1) + (1-a) theta . f(x)      off Supp(P), a > 1
//! ```
//!
//! and, for `a < 1`, `Supp(P) = Supp(L)`. The fit is a linear least-squares
//! problem in `(theta, w = Z^(a-1))`.

use serde::{Deserialize, Serialize};

use crate::distribution::{Alpha, Distribution};
use crate::error::{Error, Result};
use crate::family::{membership_residual, LinearFamily};
use crate::feasibility::family_support;
use crate::linalg;

/// Sign conditions pass at or below this.
pub const SIGN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theta: Vec<f64>,
    pub z: f64,
    /// Infinity norm of the power-law mismatch on `Supp(P)`.
    pub fit_residual: f64,
    /// Largest positive bracket off `Supp(P)` (only meaningful for `a > 1`).
    pub sign_violation: f64,
    pub support_equal: bool,
    /// The least-squares system did not pin down the parameters.
    pub degenerate: bool,
}

impl Certificate {
    /// Whether the certificate proves optimality at the given fit tolerance.
    pub fn passes(&self, alpha: Alpha, fit_tol: f64) -> bool {
        if self.degenerate || !(self.z > 0.0) {
            return false;
        }
        let form = self.fit_residual <= fit_tol && self.sign_violation <= SIGN_TOL;
        if alpha.above_one() {
            form
        } else {
            form && self.support_equal
        }
    }
}

/// `1e-8 * (1 + max_x Q(x)^(a-1))`, the fit tolerance used for converged solver output.
pub fn default_fit_tolerance(q: &Distribution, alpha: Alpha) -> f64 {
    if alpha.is_kl() {
        return 1e-8;
    }
    let a = alpha.value();
    let scale = q
        .weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| ((a - 1.0) * w.ln()).exp())
        .fold(0.0, f64::max);
    1e-8 * (1.0 + scale)
}

fn bracket(q: f64, shift: f64, a: f64) -> f64 {
    ((a - 1.0) * q.ln()).exp() + (1.0 - a) * shift
}

fn check_inputs(p: &Distribution, q: &Distribution, family: &LinearFamily) -> Result<()> {
    for d in [p.len(), q.len()] {
        if d != family.n() {
            return Err(Error::DimensionMismatch {
                expected: family.n(),
                found: d,
            });
        }
    }
    if !family.contains(p) {
        let r = membership_residual(p, family)?;
        return Err(Error::InvalidArgument(format!(
            "candidate is not a member of the family (residual {:e})",
            linalg::norm_inf(&r)
        )));
    }
    if let Some(index) = (0..q.len()).find(|&x| q.weights()[x] <= 0.0) {
        return Err(Error::QNotFullSupport { index });
    }
    Ok(())
}

/// Fits `(theta, Z)` by least squares and reports how well `pstar` matches the power law.
pub fn certify_power_law(
    pstar: &Distribution,
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
) -> Result<Certificate> {
    check_inputs(pstar, q, family)?;
    let support_equal = family_support(family)?.indices == pstar.support();
    let on = pstar.support();
    let (sub, kept) = family.restrict(on);
    let k = sub.k();
    let p = pstar.weights();
    let qw = q.weights();

    let mut design = Vec::with_capacity(on.len());
    let mut rhs = Vec::with_capacity(on.len());
    for (row_idx, &x) in on.iter().enumerate() {
        let mut row: Vec<f64> = sub.rows().iter().map(|f| f[row_idx]).collect();
        if alpha.is_kl() {
            // log P = log Q - theta . f - log Z
            row.iter_mut().for_each(|v| *v = -*v);
            row.push(-1.0);
            rhs.push(p[x].ln() - qw[x].ln());
        } else {
            let a = alpha.value();
            row.iter_mut().for_each(|v| *v *= -(1.0 - a));
            row.push(((a - 1.0) * p[x].ln()).exp());
            rhs.push(((a - 1.0) * qw[x].ln()).exp());
        }
        design.push(row);
    }
    let ls = linalg::least_squares(&design, &rhs, 1e-12);
    let mut degenerate = ls.rank < k + 1;

    let mut theta = vec![0.0; family.k()];
    for (j, &orig) in kept.iter().enumerate() {
        theta[orig] = ls.x[j];
    }
    let z = if alpha.is_kl() {
        ls.x[k].exp()
    } else {
        let w = ls.x[k];
        if !(w > 0.0) {
            degenerate = true;
        }
        w.powf(1.0 / (alpha.value() - 1.0))
    };
    let mut cert = evaluate_certificate(pstar, q, family, alpha, &theta, z)?;
    cert.support_equal = support_equal;
    // Rows that vanish on the support leave theta free off the support; a sign
    // failure there does not disprove optimality.
    if alpha.above_one() && kept.len() < family.k() && cert.sign_violation > SIGN_TOL {
        degenerate = true;
    }
    cert.degenerate = degenerate || !z.is_finite();
    Ok(cert)
}

/// Evaluates the certificate conditions for given parameters.
///
/// `support_equal` is computed; `degenerate` is false.
pub fn evaluate_certificate(
    pstar: &Distribution,
    q: &Distribution,
    family: &LinearFamily,
    alpha: Alpha,
    theta: &[f64],
    z: f64,
) -> Result<Certificate> {
    check_inputs(pstar, q, family)?;
    if theta.len() != family.k() {
        return Err(Error::DimensionMismatch {
            expected: family.k(),
            found: theta.len(),
        });
    }
    let shift = family.combine(theta);
    let p = pstar.weights();
    let qw = q.weights();
    let mut fit_residual: f64 = 0.0;
    let mut sign_violation: f64 = 0.0;
    for x in 0..p.len() {
        if alpha.is_kl() {
            if p[x] > 0.0 {
                let r = p[x].ln() + z.ln() - qw[x].ln() + shift[x];
                fit_residual = fit_residual.max(r.abs());
            }
            continue;
        }
        let a = alpha.value();
        let b = bracket(qw[x], shift[x], a);
        if p[x] > 0.0 {
            let lhs = ((a - 1.0) * (z.ln() + p[x].ln())).exp();
            fit_residual = fit_residual.max((lhs - b).abs());
        } else if a > 1.0 {
            sign_violation = sign_violation.max(b.max(0.0));
        }
    }
    let support_equal = family_support(family)?.indices == pstar.support();
    Ok(Certificate {
        theta: theta.to_vec(),
        z,
        fit_residual,
        sign_violation,
        support_equal,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample() -> LinearFamily {
        LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap()
    }

    #[test]
    fn counterexample_certificate() {
        let pstar = Distribution::new(&[0.75, 0.25, 0.0, 0.0]).unwrap();
        let cert = certify_power_law(
            &pstar,
            &Distribution::uniform(4),
            &counterexample(),
            Alpha::new(2.0).unwrap(),
        )
        .unwrap();
        assert!((cert.theta[0] + 0.05).abs() < 1e-12, "{cert:?}");
        assert!((cert.z - 0.4).abs() < 1e-12);
        assert!(cert.fit_residual <= 1e-12);
        assert_eq!(cert.sign_violation, 0.0);
        assert!(!cert.support_equal);
        assert!(cert.passes(Alpha::new(2.0).unwrap(), 1e-8));
    }

    #[test]
    fn reference_in_unconstrained_family() {
        let q = Distribution::new(&[0.2, 0.3, 0.5]).unwrap();
        for a in [0.5, 1.0, 2.0] {
            let alpha = Alpha::new(a).unwrap();
            let cert = certify_power_law(&q, &q, &LinearFamily::unconstrained(3), alpha).unwrap();
            assert!(cert.theta.is_empty());
            assert!((cert.z - 1.0).abs() < 1e-12, "{a}: {cert:?}");
            assert!(cert.fit_residual < 1e-12);
            assert!(cert.passes(alpha, 1e-8));
        }
    }

    #[test]
    fn non_projection_fails() {
        let p = Distribution::new(&[0.8227, 0.0625, 0.0536, 0.0612]).unwrap();
        // The quoted point satisfies the constraint only to four decimals.
        let fam = counterexample();
        let res = membership_residual(&p, &fam).unwrap()[0];
        assert!(res.abs() < 1e-3);
        let shifted =
            LinearFamily::new(4, vec![fam.rows()[0].iter().map(|f| f - res).collect()]).unwrap();
        let cert = certify_power_law(
            &p,
            &Distribution::uniform(4),
            &shifted,
            Alpha::new(2.0).unwrap(),
        )
        .unwrap();
        assert!(cert.fit_residual > 1e-3, "{cert:?}");
        assert!(!cert.passes(Alpha::new(2.0).unwrap(), 1e-8));
    }

    #[test]
    fn rejects_non_members() {
        let err = certify_power_law(
            &Distribution::uniform(4),
            &Distribution::uniform(4),
            &counterexample(),
            Alpha::new(2.0).unwrap(),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}

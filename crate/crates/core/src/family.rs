//! Linear families `{P : sum_x P(x) f_i(x) = 0, i = 1..k}`.

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::linalg;

/// Pivot threshold for dropping linearly dependent constraint rows.
pub const RANK_TOL: f64 = 1e-10;

/// Default membership tolerance, scaled by each row's infinity norm.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A set of homogeneous moment constraints over an alphabet of `n` symbols.
///
/// Rows are stored exactly as given (no rescaling), minus any that are
/// linearly dependent on earlier rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFamily {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl LinearFamily {
    /// Builds a family from rows already in homogeneous form.
    pub fn new(n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("non-finite constraint entry".into()));
            }
        }
        let (kept, _) = linalg::independent_rows(&rows, RANK_TOL);
        if kept.len() >= n {
            // Full rank homogeneous system: only P = 0 solves it.
            return Err(Error::EmptyFamily);
        }
        let rows = kept.into_iter().map(|i| rows[i].clone()).collect();
        Ok(Self { n, rows })
    }

    /// The whole simplex.
    pub fn unconstrained(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `sum_i theta_i f_i(x)` for every symbol.
    pub fn combine(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, &t) in self.rows.iter().zip(theta) {
            linalg::axpy(&mut out, t, row);
        }
        out
    }

    /// Restricts every row to the symbols in `support` and re-reduces rank.
    ///
    /// Returns the restricted family together with the indices of the original
    /// rows that survived.
    pub fn restrict(&self, support: &[usize]) -> (LinearFamily, Vec<usize>) {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| support.iter().map(|&x| r[x]).collect())
            .collect();
        let (kept, _) = linalg::independent_rows(&rows, RANK_TOL);
        let family = LinearFamily {
            n: support.len(),
            rows: kept.iter().map(|&i| rows[i].clone()).collect(),
        };
        (family, kept)
    }

    /// Membership test with [`MEMBERSHIP_TOL`] scaled by each row's infinity norm.
    pub fn contains(&self, p: &Distribution) -> bool {
        self.contains_within(p, MEMBERSHIP_TOL)
    }

    pub fn contains_within(&self, p: &Distribution, tol: f64) -> bool {
        match membership_residual(p, self) {
            Ok(res) => res
                .iter()
                .zip(&self.rows)
                .all(|(r, row)| r.abs() <= tol * linalg::norm_inf(row).max(1.0)),
            Err(_) => false,
        }
    }
}

/// Folds right-hand sides into the rows: `sum P f_i = c_i` becomes `sum P (f_i - c_i) = 0`.
///
/// Rows that become zero are implied by normalization and dropped, as are rows
/// dependent on earlier ones. A row that becomes a nonzero constant can never
/// be satisfied and yields [`Error::Infeasible`].
pub fn homogenize(n: usize, rows: &[(Vec<f64>, f64)]) -> Result<LinearFamily> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, (f, c)) in rows.iter().enumerate() {
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.len(),
            });
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite rhs in constraint {i}"
            )));
        }
        let h: Vec<f64> = f.iter().map(|x| x - c).collect();
        let scale = f.iter().fold(c.abs(), |m, x| m.max(x.abs())).max(1.0);
        let zero = linalg::norm_inf(&h) <= RANK_TOL * scale;
        let constant = h.iter().all(|x| (x - h[0]).abs() <= RANK_TOL * scale);
        if constant && !zero {
            return Err(Error::Infeasible { row: i });
        }
        out.push(h);
    }
    LinearFamily::new(n, out)
}

/// `(sum_x P(x) f_i(x))_i`.
pub fn membership_residual(p: &Distribution, family: &LinearFamily) -> Result<Vec<f64>> {
    if p.len() != family.n() {
        return Err(Error::DimensionMismatch {
            expected: family.n(),
            found: p.len(),
        });
    }
    Ok(family
        .rows()
        .iter()
        .map(|row| linalg::dot(row, p.weights()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counterexample_row_homogenizes() {
        let fam = homogenize(4, &[(vec![8.0, 4.0, 2.0, 1.0], 7.0)]).unwrap();
        assert_eq!(fam.rows(), &[vec![1.0, -3.0, -5.0, -6.0]]);
    }

    #[test]
    fn normalization_row_is_dropped() {
        let fam = homogenize(3, &[(vec![1.0, 1.0, 1.0], 1.0)]).unwrap();
        assert_eq!(fam.k(), 0);
    }

    #[test]
    fn duplicate_direction_removed() {
        let fam = homogenize(
            3,
            &[(vec![1.0, 0.0, -1.0], 0.0), (vec![2.0, 0.0, -2.0], 0.0)],
        )
        .unwrap();
        assert_eq!(fam.rows(), &[vec![1.0, 0.0, -1.0]]);
    }

    #[test]
    fn constant_row_with_wrong_rhs_is_infeasible() {
        assert!(matches!(
            homogenize(4, &[(vec![1.0; 4], 2.0)]),
            Err(Error::Infeasible { row: 0 })
        ));
    }

    #[test]
    fn mismatched_row_length() {
        assert!(matches!(
            homogenize(3, &[(vec![1.0, 2.0], 0.0)]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn residuals() {
        let fam = LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap();
        let star = Distribution::new(&[0.75, 0.25, 0.0, 0.0]).unwrap();
        assert_eq!(membership_residual(&star, &fam).unwrap(), vec![0.0]);
        assert!(fam.contains(&star));
        let u = Distribution::uniform(4);
        assert_eq!(membership_residual(&u, &fam).unwrap(), vec![-3.25]);
        let empty = LinearFamily::unconstrained(4);
        assert!(membership_residual(&u, &empty).unwrap().is_empty());
        assert!(matches!(
            membership_residual(&Distribution::uniform(3), &fam),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn restrict_drops_vanishing_rows() {
        let fam = LinearFamily::new(3, vec![vec![0.0, 1.0, 0.0]]).unwrap();
        let (sub, kept) = fam.restrict(&[0, 2]);
        assert_eq!(sub.k(), 0);
        assert!(kept.is_empty());
    }

    fn arb_rows() -> impl Strategy<Value = (usize, Vec<(Vec<f64>, f64)>)> {
        (3usize..7).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((prop::collection::vec(-5.0f64..5.0, n), -2.0f64..2.0), 0..3),
            )
        })
    }

    proptest! {
        #[test]
        fn homogenize_is_idempotent((n, rows) in arb_rows()) {
            if let Ok(fam) = homogenize(n, &rows) {
                let again: Vec<(Vec<f64>, f64)> =
                    fam.rows().iter().map(|r| (r.clone(), 0.0)).collect();
                prop_assert_eq!(homogenize(n, &again).unwrap(), fam);
            }
        }

        #[test]
        fn residual_is_linear(
            (n, rows) in arb_rows(),
            a in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let Ok(fam) = homogenize(n, &rows) else { return Ok(()); };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || {
                let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
                Distribution::from_nonnegative(&w)
            };
            let (p1, p2) = (draw(), draw());
            let mix: Vec<f64> = p1.weights().iter().zip(p2.weights())
                .map(|(x, y)| a * x + (1.0 - a) * y).collect();
            let mix = Distribution::from_nonnegative(&mix);
            let r1 = membership_residual(&p1, &fam).unwrap();
            let r2 = membership_residual(&p2, &fam).unwrap();
            let rm = membership_residual(&mix, &fam).unwrap();
            for i in 0..fam.k() {
                prop_assert!((rm[i] - (a * r1[i] + (1.0 - a) * r2[i])).abs() <= 1e-12);
            }
        }
    }
}

//! Probability vectors on a finite alphabet and the order parameter alpha.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries below this are treated as roundoff and clipped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-15;

/// Default tolerance on `|sum - 1|` accepted by [`Distribution::new`].
pub const DEFAULT_SUM_TOL: f64 = 1e-9;

/// `|alpha - 1|` below this switches every computation to the Kullback-Leibler branch.
pub const KL_BRANCH_TOL: f64 = 1e-8;

/// A point on the probability simplex together with its support.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
    support: Vec<usize>,
}

/// Checks `raw` and renormalizes it once.
///
/// Entries in `[-1e-15, 0)` are clipped to zero; anything more negative is
/// rejected. The sum must be within `tol` of one.
pub fn validate_distribution(raw: &[f64], tol: f64) -> Result<Distribution> {
    if raw.is_empty() {
        return Err(Error::Empty);
    }
    let mut weights = Vec::with_capacity(raw.len());
    for (index, &w) in raw.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if w < -NEGATIVE_SLACK {
            return Err(Error::NegativeMass { index, value: w });
        }
        weights.push(w.max(0.0));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > tol || sum <= 0.0 {
        return Err(Error::BadSum { sum });
    }
    Ok(Distribution::from_normalized(
        weights.into_iter().map(|w| w / sum).collect(),
    ))
}

impl Distribution {
    /// Validates with the default sum tolerance.
    pub fn new(raw: &[f64]) -> Result<Self> {
        validate_distribution(raw, DEFAULT_SUM_TOL)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs at least one symbol");
        Self::from_normalized(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        Self::from_normalized(w)
    }

    /// Clips negatives and divides by the sum, whatever it is.
    ///
    /// Used for solver iterates that are known to be close to the simplex.
    /// Panics if nothing positive remains.
    pub fn from_nonnegative(raw: &[f64]) -> Self {
        let clipped: Vec<f64> = raw.iter().map(|&w| if w > 0.0 { w } else { 0.0 }).collect();
        let sum: f64 = clipped.iter().sum();
        assert!(
            sum > 0.0 && sum.is_finite(),
            "no positive mass to normalize"
        );
        Self::from_normalized(clipped.into_iter().map(|w| w / sum).collect())
    }

    fn from_normalized(weights: Vec<f64>) -> Self {
        let support = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect();
        Self { weights, support }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Indices with strictly positive mass, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn has_full_support(&self) -> bool {
        self.support.len() == self.weights.len()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The order of the relative entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha {
    value: f64,
    kl_branch: bool,
}

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidAlpha(value));
        }
        Ok(Self {
            value,
            kl_branch: (value - 1.0).abs() < KL_BRANCH_TOL,
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    /// True when alpha is close enough to one that the Kullback-Leibler limit is used.
    pub fn is_kl(self) -> bool {
        self.kl_branch
    }

    pub fn below_one(self) -> bool {
        !self.kl_branch && self.value < 1.0
    }

    pub fn above_one(self) -> bool {
        !self.kl_branch && self.value > 1.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.value
    }
}

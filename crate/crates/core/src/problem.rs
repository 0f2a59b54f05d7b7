//! The on-disk unit of work: order, reference distribution and constraints.

use serde::{Deserialize, Serialize};

use crate::distribution::{validate_distribution, Alpha, Distribution, DEFAULT_SUM_TOL};
use crate::error::{Error, Result};
use crate::family::{homogenize, LinearFamily};

/// One constraint `sum_x P(x) f(x) = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstraint {
    pub f: Vec<f64>,
    #[serde(default)]
    pub rhs: f64,
}

/// A problem exactly as written in a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub alpha: f64,
    pub q: Vec<f64>,
    #[serde(default)]
    pub constraints: Vec<RawConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A validated problem.
///
/// The raw reference weights are kept so that [`ProblemSpec::to_raw`]
/// reproduces the input exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub labels: Option<Vec<String>>,
    pub alpha: Alpha,
    pub q: Distribution,
    pub constraints: Vec<(Vec<f64>, f64)>,
    raw_q: Vec<f64>,
}

impl ProblemSpec {
    pub fn from_raw(raw: RawProblem) -> Result<Self> {
        let alpha = Alpha::new(raw.alpha)?;
        let q = validate_distribution(&raw.q, DEFAULT_SUM_TOL)?;
        let n = q.len();
        if let Some(labels) = &raw.labels {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: labels.len(),
                });
            }
        }
        for c in &raw.constraints {
            if c.f.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.f.len(),
                });
            }
            if c.f.iter().chain([&c.rhs]).any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(
                    "constraint entries must be finite".into(),
                ));
            }
        }
        Ok(Self {
            labels: raw.labels,
            alpha,
            q,
            constraints: raw.constraints.into_iter().map(|c| (c.f, c.rhs)).collect(),
            raw_q: raw.q,
        })
    }

    pub fn to_raw(&self) -> RawProblem {
        RawProblem {
            alpha: self.alpha.value(),
            q: self.raw_q.clone(),
            constraints: self
                .constraints
                .iter()
                .map(|(f, rhs)| RawConstraint {
                    f: f.clone(),
                    rhs: *rhs,
                })
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// The homogenized family.
    pub fn family(&self) -> Result<LinearFamily> {
        homogenize(self.n(), &self.constraints)
    }
}

//! Seeded random members of a family and random test instances.

use rand::Rng;
use rand_distr::{Distribution as _, Gamma, StandardNormal};

use crate::distribution::{Alpha, Distribution};
use crate::error::{Error, Result};
use crate::family::{homogenize, LinearFamily};
use crate::linalg;
use crate::oracle::{null_space_chart, NullSpaceChart};

/// Draws members of `simplex ∩ L` around an interior point.
///
/// A sample is `base + s * d` where `d` is a standard Gaussian combination of
/// the chart basis and `s` is uniform on `[0, s_max]`, with `s_max` the largest
/// scale that keeps every coordinate nonnegative.
#[derive(Debug, Clone)]
pub struct MemberSampler {
    chart: Option<NullSpaceChart>,
    point: Distribution,
}

impl MemberSampler {
    pub fn new(family: &LinearFamily) -> Result<Self> {
        match null_space_chart(family) {
            Ok(chart) => Ok(Self {
                point: chart.base_point.clone(),
                chart: Some(chart),
            }),
            Err(Error::ZeroDimensional { point }) => Ok(Self {
                chart: None,
                point: Distribution::from_nonnegative(&point),
            }),
            Err(e) => Err(e),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Distribution {
        let Some(chart) = &self.chart else {
            return self.point.clone();
        };
        let t: Vec<f64> = (0..chart.dim())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let n = self.point.len();
        let mut d = vec![0.0; n];
        for (b, &tj) in chart.basis.iter().zip(&t) {
            linalg::axpy(&mut d, tj, b);
        }
        let base = self.point.weights();
        let s_max = (0..n)
            .filter(|&x| d[x] < 0.0)
            .map(|x| base[x] / -d[x])
            .fold(f64::INFINITY, f64::min);
        if !s_max.is_finite() {
            return self.point.clone();
        }
        let s = rng.random::<f64>() * s_max;
        let mut p = base.to_vec();
        linalg::axpy(&mut p, s, &d);
        Distribution::from_nonnegative(&p)
    }
}

/// Dirichlet draw with every concentration equal to `conc`.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize, conc: f64) -> Distribution {
    let gamma = Gamma::new(conc, 1.0).expect("positive concentration");
    loop {
        let w: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        if w.iter().all(|&x| x > 0.0) {
            return Distribution::from_nonnegative(&w);
        }
    }
}

/// A projection problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub q: Distribution,
    pub family: LinearFamily,
    pub alpha: Alpha,
}

/// A random feasible instance with `Supp(L)` equal to the whole alphabet.
///
/// `k` Gaussian rows are shifted so that a random full-support point of the
/// simplex satisfies them; `Q` is a flat Dirichlet draw.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    alpha: Alpha,
) -> Result<Instance> {
    if k >= n {
        return Err(Error::EmptyFamily);
    }
    let anchor = random_distribution(rng, n, 2.0);
    let rows: Vec<(Vec<f64>, f64)> = (0..k)
        .map(|_| {
            let f: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let c = linalg::dot(&f, anchor.weights());
            (f, c)
        })
        .collect();
    Ok(Instance {
        q: random_distribution(rng, n, 1.0),
        family: homogenize(n, &rows)?,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fam = LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap();
        let sampler = MemberSampler::new(&fam).unwrap();
        for _ in 0..200 {
            let p = sampler.sample(&mut rng);
            assert!(fam.contains(&p), "{p:?}");
        }
    }

    #[test]
    fn zero_dimensional_family_repeats_its_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fam = LinearFamily::new(2, vec![vec![1.0, -1.0]]).unwrap();
        let s = MemberSampler::new(&fam).unwrap();
        assert_eq!(s.sample(&mut rng).weights(), &[0.5, 0.5]);
    }

    #[test]
    fn instances_are_feasible_and_seeded() {
        let alpha = Alpha::new(0.5).unwrap();
        let a = random_instance(&mut ChaCha8Rng::seed_from_u64(3), 6, 2, alpha).unwrap();
        let b = random_instance(&mut ChaCha8Rng::seed_from_u64(3), 6, 2, alpha).unwrap();
        assert_eq!(a.q, b.q);
        assert_eq!(a.family.rows(), b.family.rows());
        assert_eq!(
            crate::feasibility::family_support(&a.family).unwrap().len(),
            6
        );
    }
}

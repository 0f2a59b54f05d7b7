//! Benchmark fixtures.

use alphaproj::sampling::{random_instance, Instance};
use alphaproj::{homogenize, Alpha, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn counterexample() -> Instance {
    Instance {
        q: Distribution::uniform(4),
        family: homogenize(4, &[(vec![8.0, 4.0, 2.0, 1.0], 7.0)]).unwrap(),
        alpha: Alpha::new(2.0).unwrap(),
    }
}

/// A seeded instance on `n` symbols with `k` constraints.
pub fn instance(n: usize, k: usize, alpha: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64((n * 31 + k) as u64);
    random_instance(&mut rng, n, k, Alpha::new(alpha).unwrap()).unwrap()
}

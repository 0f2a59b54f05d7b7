#![allow(dead_code)]

use alphaproj::sampling::{random_instance, Instance};
use alphaproj::{Alpha, LinearFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn counterexample_family() -> LinearFamily {
    alphaproj::homogenize(4, &[(vec![8.0, 4.0, 2.0, 1.0], 7.0)]).unwrap()
}

/// `count` seeded instances with `n` in `3..=8`, `k` in `1..=3`, cycling through `alphas`.
pub fn instances(seed: u64, count: usize, alphas: &[f64]) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.random_range(3..=8usize);
            let k = rng.random_range(1..=3usize.min(n - 1));
            let alpha = Alpha::new(alphas[i % alphas.len()]).unwrap();
            random_instance(&mut rng, n, k, alpha).unwrap()
        })
        .collect()
}

/// Dimension of the feasible polytope of a full-support family.
pub fn chart_dim(inst: &Instance) -> usize {
    inst.family.n() - 1 - inst.family.k()
}

//! Fixtures shared by the benchmarks.

use lingam_spp::{generate, Dataset, GenParams};

/// A confounder-free simulated dataset with moderate sparsity.
pub fn fixture(p: usize, n: usize, seed: u64) -> Dataset {
    let params = GenParams { sparsity: 0.4, ..GenParams::new(p, n, seed) };
    generate(&params).expect("valid parameters").0
}

/// `n` draws of a skewed variable, for the measure benchmarks.
pub fn skewed_column(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>().powi(3)).collect()
}

//! Synthetic linear non-Gaussian data with optional latent confounders.
//!
//! Draw order from the single seeded generator is fixed: `B` entries row by
//! row, then noise columns, then confounder columns, then `Lambda` columns,
//! then the column shuffle. Changing it changes every dataset.

mod noise;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{matrix_rank, Dataset, GroundTruth};

pub use noise::NoiseShape;

/// Name of the full twelve-shape noise set.
pub const STANDARD_FAMILY: &str = "standard12";

const MAX_LAMBDA_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub p: usize,
    pub n_samples: usize,
    /// Probability that a possible edge is absent.
    pub sparsity: f64,
    pub n_confounders: usize,
    pub confoundedness: f64,
    /// Confounders are multiplied by `10^confounding_strength_exp`.
    pub confounding_strength_exp: f64,
    /// `"standard12"` or the name of one shape from [`NoiseShape`].
    #[serde(default = "default_family")]
    pub noise_family: String,
    pub seed: u64,
}

fn default_family() -> String {
    STANDARD_FAMILY.to_string()
}

impl GenParams {
    pub fn new(p: usize, n_samples: usize, seed: u64) -> Self {
        Self {
            p,
            n_samples,
            sparsity: 0.0,
            n_confounders: 0,
            confoundedness: 0.0,
            confounding_strength_exp: 1.0,
            noise_family: default_family(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.p < 2 {
            return bad(format!("p must be at least 2, got {}", self.p));
        }
        if self.n_samples < 2 {
            return bad(format!("n_samples must be at least 2, got {}", self.n_samples));
        }
        for (name, v) in [("sparsity", self.sparsity), ("confoundedness", self.confoundedness)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !self.confounding_strength_exp.is_finite() {
            return bad("confounding_strength_exp must be finite".into());
        }
        self.shapes()?;
        Ok(())
    }

    fn shapes(&self) -> Result<Vec<NoiseShape>> {
        if self.noise_family == STANDARD_FAMILY {
            return Ok(NoiseShape::ALL.to_vec());
        }
        NoiseShape::from_name(&self.noise_family)
            .map(|s| vec![s])
            .ok_or_else(|| Error::InvalidParams(format!("unknown noise family '{}'", self.noise_family)))
    }
}

/// A noise column: random shape from `shapes`, variance drawn from U(1, 3).
fn noise_column(rng: &mut ChaCha8Rng, shapes: &[NoiseShape], n: usize) -> Vec<f64> {
    let shape = shapes[rng.random_range(0..shapes.len())];
    let sd = rng.random_range(1.0..3.0f64).sqrt();
    (0..n).map(|_| sd * shape.sample(rng)).collect()
}

/// Simulates `x = Bx + Lambda f + e` and returns the data with its columns
/// shuffled, together with the truth expressed in that shuffled basis.
pub fn generate(params: &GenParams) -> Result<(Dataset, GroundTruth)> {
    params.validate()?;
    let shapes = params.shapes()?;
    let (p, n, q) = (params.p, params.n_samples, params.n_confounders);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // b[i][j], j < i, in the true causal order
    let mut b = vec![vec![0.0; p]; p];
    for (i, row) in b.iter_mut().enumerate() {
        for entry in row.iter_mut().take(i) {
            let magnitude = rng.random_range(0.5..1.5);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let keep = rng.random::<f64>() < 1.0 - params.sparsity;
            if keep {
                *entry = sign * magnitude;
            }
        }
    }

    let noise: Vec<Vec<f64>> = (0..p).map(|_| noise_column(&mut rng, &shapes, n)).collect();
    let strength = 10f64.powf(params.confounding_strength_exp);
    let latent: Vec<Vec<f64>> = (0..q)
        .map(|_| noise_column(&mut rng, &shapes, n).into_iter().map(|v| v * strength).collect())
        .collect();

    let lambda_cols = loading_columns(&mut rng, p, q, params.confoundedness)?;

    let mut x: Vec<Vec<f64>> = Vec::with_capacity(p);
    for i in 0..p {
        let mut col = noise[i].clone();
        for (j, &w) in b[i].iter().enumerate().take(i) {
            if w != 0.0 {
                for (v, xj) in col.iter_mut().zip(&x[j]) {
                    *v += w * xj;
                }
            }
        }
        for (l, f) in latent.iter().enumerate() {
            if lambda_cols[l][i] != 0.0 {
                for (v, fl) in col.iter_mut().zip(f) {
                    *v += fl;
                }
            }
        }
        x.push(col);
    }

    // column c of the output holds true variable perm[c]
    let mut perm: Vec<usize> = (0..p).collect();
    perm.shuffle(&mut rng);
    let mut true_order = vec![0; p];
    for (c, &v) in perm.iter().enumerate() {
        true_order[v] = c;
    }
    let columns: Vec<Vec<f64>> = perm.iter().map(|&v| x[v].clone()).collect();
    let b_cols: Vec<Vec<f64>> =
        perm.iter().map(|&vi| perm.iter().map(|&vj| b[vi][vj]).collect()).collect();
    let lambda: Vec<Vec<f64>> =
        perm.iter().map(|&v| (0..q).map(|l| lambda_cols[l][v]).collect()).collect();

    let data = Dataset::with_default_names(columns)?;
    let truth = GroundTruth { b: b_cols, lambda, true_order, params: params.clone() };
    Ok((data, truth))
}

/// Binary loading vectors: two forced children plus Bernoulli extras, no
/// duplicates, linearly independent as a set.
fn loading_columns(rng: &mut ChaCha8Rng, p: usize, q: usize, rate: f64) -> Result<Vec<Vec<f64>>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(q);
    let mut retries = 0;
    while cols.len() < q {
        let forced = index::sample(rng, p, 2);
        let mut col: Vec<f64> = (0..p).map(|_| f64::from(rng.random::<f64>() < rate)).collect();
        for i in forced.iter() {
            col[i] = 1.0;
        }
        let duplicate = cols.contains(&col);
        if !duplicate {
            cols.push(col);
            if matrix_rank(&cols) == cols.len() {
                continue;
            }
            cols.pop();
        }
        retries += 1;
        if retries > MAX_LAMBDA_RETRIES {
            return Err(Error::GenerationFailed(format!(
                "could not draw {q} independent confounder loadings over {p} variables"
            )));
        }
    }
    Ok(cols)
}

/// Parameters for one benchmark trial: sparsity ~ U(0,1), strength exponent
/// ~ U(1,2), 1 to 3 confounders when requested, confoundedness ~ U(0,1).
pub fn sample_benchmark_params(p: usize, n: usize, with_confounders: bool, seed: u64) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sparsity = rng.random::<f64>();
    let strength = rng.random_range(1.0..2.0);
    let q = rng.random_range(1..=3usize);
    let confoundedness = rng.random::<f64>();
    let data_seed = rng.random::<u64>();
    GenParams {
        p,
        n_samples: n,
        sparsity,
        n_confounders: if with_confounders { q } else { 0 },
        confoundedness: if with_confounders { confoundedness } else { 0.0 },
        confounding_strength_exp: strength,
        noise_family: default_family(),
        seed: data_seed,
    }
}

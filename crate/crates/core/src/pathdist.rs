//! Total path lengths over every (or a random sample of) causal ordering,
//! and the standardized-moment summary of their log-lengths.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MeasureConfig;
use crate::model::{Dataset, FeatureSet, PriorKnowledge};
use crate::search::{validate_search_input, CostLattice};

pub const DEFAULT_ENUMERATION_CAP: usize = 8;
pub const DEFAULT_LOG_EPSILON: f64 = 1e-12;
/// Lowest and highest standardized moment kept as a feature.
pub const MOMENT_RANGE: std::ops::RangeInclusive<u32> = 3..=30;
pub const N_MOMENTS: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDistribution {
    pub mode: PathMode,
    pub lengths: Vec<f64>,
}

impl PathDistribution {
    pub fn sample_size(&self) -> usize {
        self.lengths.len()
    }

    pub fn min(&self) -> Option<f64> {
        self.lengths.iter().copied().reduce(f64::min)
    }
}

/// Every ordering's total cost with the default cap of 8 features.
pub fn enumerate_paths(data: &Dataset, config: &MeasureConfig) -> Result<PathDistribution> {
    enumerate_paths_capped(data, config, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_paths_capped(data: &Dataset, config: &MeasureConfig, cap: usize) -> Result<PathDistribution> {
    let p = data.n_features();
    if p > cap {
        return Err(Error::TooManyFeatures { p, cap });
    }
    validate_search_input(data, &PriorKnowledge::none())?;
    let mut lattice = CostLattice::new(data, *config)?;
    enumerate_lattice(&mut lattice)
}

/// Depth-first walk over all root-to-goal paths in lexicographic order of
/// the permutations. Each edge weight comes from the lattice memo, so it is
/// computed once no matter how many permutations share it.
pub fn enumerate_lattice(lattice: &mut CostLattice) -> Result<PathDistribution> {
    let p = lattice.n_features();
    let count: usize = (1..=p).product();
    let mut lengths = Vec::with_capacity(count);
    walk(lattice, FeatureSet::full(p), 0.0, &mut lengths)?;
    Ok(PathDistribution { mode: PathMode::Exhaustive, lengths })
}

fn walk(lattice: &mut CostLattice, remaining: FeatureSet, prefix: f64, out: &mut Vec<f64>) -> Result<()> {
    if remaining.len() <= 1 {
        out.push(prefix);
        return Ok(());
    }
    for c in remaining.iter() {
        let w = lattice.step_cost(remaining, c)?;
        walk(lattice, remaining.without(c), prefix + w, out)?;
    }
    Ok(())
}

/// Total costs of `n` permutations drawn uniformly with replacement. The
/// draws for a given seed form one stream, so a smaller `n` yields a prefix
/// of a larger one.
pub fn sample_paths(data: &Dataset, config: &MeasureConfig, n: usize, seed: u64) -> Result<PathDistribution> {
    validate_search_input(data, &PriorKnowledge::none())?;
    let mut lattice = CostLattice::new(data, *config)?;
    sample_lattice(&mut lattice, n, seed)
}

pub fn sample_lattice(lattice: &mut CostLattice, n: usize, seed: u64) -> Result<PathDistribution> {
    if n == 0 {
        return Err(Error::InvalidParams("sample size must be at least 1".into()));
    }
    let p = lattice.n_features();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..p).collect();
    let mut lengths = Vec::with_capacity(n);
    for _ in 0..n {
        perm.sort_unstable();
        perm.shuffle(&mut rng);
        lengths.push(lattice.path_cost(&perm)?.1);
    }
    Ok(PathDistribution { mode: PathMode::Sampled, lengths })
}

/// Standardized moments 3..=30 of `log(length + log_epsilon)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentFeatures {
    pub log_epsilon: f64,
    pub moments: Vec<f64>,
}

pub fn moment_features(dist: &PathDistribution) -> Result<MomentFeatures> {
    moment_features_with_epsilon(dist, DEFAULT_LOG_EPSILON)
}

pub fn moment_features_with_epsilon(dist: &PathDistribution, log_epsilon: f64) -> Result<MomentFeatures> {
    let logs: Vec<f64> = dist.lengths.iter().map(|&l| (l + log_epsilon).ln()).collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "log(length + {log_epsilon}) is not finite for some path"
        )));
    }
    Ok(MomentFeatures { log_epsilon, moments: standardized_moments(&logs)? })
}

/// `E[z^k]` for k = 3..=30, where `z` is `values` standardized with the
/// population standard deviation.
pub fn standardized_moments(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::DegenerateDistribution);
    }
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / n;
    if var <= 0.0 || !var.is_finite() {
        return Err(Error::DegenerateDistribution);
    }
    let sd = var.sqrt();
    let z: Vec<f64> = values.iter().map(|v| (v - mean) / sd).collect();
    let moments = MOMENT_RANGE
        .map(|k| compensated_sum(z.iter().map(|v| v.powi(k as i32))) / n)
        .collect::<Vec<_>>();
    if moments.iter().any(|m| !m.is_finite()) {
        return Err(Error::DegenerateDistribution);
    }
    Ok(moments)
}

/// Neumaier summation; high moments add terms spanning many magnitudes.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

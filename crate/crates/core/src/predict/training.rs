use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MeasureConfig;
use crate::metrics::ordering_error;
use crate::model::PriorKnowledge;
use crate::pathdist::{enumerate_lattice, moment_features, sample_lattice, MomentFeatures, DEFAULT_ENUMERATION_CAP};
use crate::search::{direct_lingam_on, shortest_path_on, CostLattice};
use crate::simgen::{generate, sample_benchmark_params, GenParams};
use crate::stats::derive_seed;

use super::{FeatureMeta, LabeledFeatures};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Target {
    Confounder,
    SparsityGtHalf,
    SparsityValue,
    SppExact,
    DirectExact,
    SppEo,
    DirectEo,
}

impl Target {
    pub fn is_binary(self) -> bool {
        matches!(self, Target::Confounder | Target::SparsityGtHalf | Target::SppExact | Target::DirectExact)
    }

    fn needs_orderings(self) -> bool {
        matches!(self, Target::SppExact | Target::DirectExact | Target::SppEo | Target::DirectEo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum PathSampling {
    Exhaustive,
    Sampled { samples: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub p_values: Vec<usize>,
    pub trials_per_p: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub measure: MeasureConfig,
    pub paths: PathSampling,
    /// Also run both searches so ordering targets can be labelled.
    pub with_orderings: bool,
    pub parallel: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            p_values: vec![4, 5, 6],
            trials_per_p: 100,
            n_samples: 1000,
            seed: 0,
            measure: MeasureConfig::plr(),
            paths: PathSampling::Exhaustive,
            with_orderings: false,
            parallel: true,
        }
    }
}

/// Everything one simulated dataset contributes to any target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub params: GenParams,
    pub features: MomentFeatures,
    pub spp_eo: Option<f64>,
    pub direct_eo: Option<f64>,
}

impl TrialRecord {
    /// The row for `target`, or `None` when the ordering it needs was not run.
    pub fn labeled(&self, target: Target) -> Option<LabeledFeatures> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let label = match target {
            Target::Confounder => flag(self.params.n_confounders > 0),
            Target::SparsityGtHalf => flag(self.params.sparsity > 0.5),
            Target::SparsityValue => self.params.sparsity,
            Target::SppExact => flag(self.spp_eo? == 0.0),
            Target::DirectExact => flag(self.direct_eo? == 0.0),
            Target::SppEo => self.spp_eo?,
            Target::DirectEo => self.direct_eo?,
        };
        Some(LabeledFeatures {
            features: self.features.moments.clone(),
            label,
            meta: FeatureMeta { p: self.params.p, seed: self.params.seed, target },
        })
    }
}

fn run_trial(config: &TrainingConfig, p: usize, trial: usize) -> Result<TrialRecord> {
    let trial_seed = derive_seed(&[config.seed, p as u64, trial as u64]);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let with_confounders = rng.random::<bool>();
    let params = sample_benchmark_params(p, config.n_samples, with_confounders, rng.random());
    let (data, truth) = generate(&params)?;
    let mut lattice = CostLattice::new(&data, config.measure)?;
    let dist = match config.paths {
        PathSampling::Exhaustive => {
            if p > DEFAULT_ENUMERATION_CAP {
                return Err(Error::TooManyFeatures { p, cap: DEFAULT_ENUMERATION_CAP });
            }
            enumerate_lattice(&mut lattice)?
        }
        PathSampling::Sampled { samples } => sample_lattice(&mut lattice, samples, rng.random())?,
    };
    let features = moment_features(&dist)?;
    let (mut spp_eo, mut direct_eo) = (None, None);
    if config.with_orderings {
        let none = PriorKnowledge::none();
        let spp = shortest_path_on(&mut lattice, &none)?;
        let direct = direct_lingam_on(&mut lattice, &none)?;
        spp_eo = Some(ordering_error(&spp.order.order, &truth.true_order)?.e_o);
        direct_eo = Some(ordering_error(&direct.order.order, &truth.true_order)?.e_o);
    }
    Ok(TrialRecord { params, features, spp_eo, direct_eo })
}

/// Simulates `trials_per_p` datasets for every `p`, each confounded with
/// probability one half. Trials that fail are logged and dropped; output
/// order does not depend on parallelism.
pub fn simulate_trials(config: &TrainingConfig) -> Vec<TrialRecord> {
    let jobs: Vec<(usize, usize)> =
        config.p_values.iter().flat_map(|&p| (0..config.trials_per_p).map(move |t| (p, t))).collect();
    let run = |&(p, t): &(usize, usize)| match run_trial(config, p, t) {
        Ok(r) => Some(r),
        Err(e) => {
            log::warn!("trial p={p} #{t} skipped: {e}");
            None
        }
    };
    let out: Vec<Option<TrialRecord>> =
        if config.parallel { jobs.par_iter().map(run).collect() } else { jobs.iter().map(run).collect() };
    out.into_iter().flatten().collect()
}

/// Labelled moment features for `target`.
pub fn build_training_set(target: Target, config: &TrainingConfig) -> Vec<LabeledFeatures> {
    let config = TrainingConfig { with_orderings: config.with_orderings || target.needs_orderings(), ..config.clone() };
    simulate_trials(&config).iter().filter_map(|r| r.labeled(target)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> TrainingConfig {
        TrainingConfig { p_values: vec![3, 4], trials_per_p: 6, n_samples: 300, seed, ..Default::default() }
    }

    #[test]
    fn labels_follow_params() {
        let cfg = TrainingConfig { with_orderings: true, ..small(1) };
        let trials = simulate_trials(&cfg);
        assert_eq!(trials.len(), 12);
        for r in &trials {
            let s = r.labeled(Target::SparsityGtHalf).unwrap();
            assert_eq!(s.label == 1.0, r.params.sparsity > 0.5);
            let c = r.labeled(Target::Confounder).unwrap();
            assert_eq!(c.label == 1.0, r.params.n_confounders > 0);
            let e = r.labeled(Target::SppExact).unwrap();
            assert_eq!(e.label == 1.0, r.spp_eo == Some(0.0));
            assert_eq!(e.features.len(), 28);
            assert!(r.spp_eo.unwrap() <= 1.0);
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let a = simulate_trials(&TrainingConfig { parallel: true, ..small(2) });
        let b = simulate_trials(&TrainingConfig { parallel: false, ..small(2) });
        assert_eq!(a, b);
    }

    #[test]
    fn ordering_targets_force_searches() {
        let rows = build_training_set(Target::DirectEo, &small(3));
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.label)));
        let plain = simulate_trials(&small(3));
        assert!(plain[0].labeled(Target::SppEo).is_none());
    }

    #[test]
    fn sampled_paths() {
        let cfg = TrainingConfig { paths: PathSampling::Sampled { samples: 40 }, ..small(4) };
        assert_eq!(simulate_trials(&cfg).len(), 12);
    }
}

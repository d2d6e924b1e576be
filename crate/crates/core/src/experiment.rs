//! Seeded simulation grid comparing ordering methods, with and without
//! prior knowledge.

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::measures::{KRule, MeasureConfig};
use crate::metrics::ordering_error;
use crate::model::{expand_prior, Dataset, GroundTruth, PriorKnowledge};
use crate::search::{direct_lingam_order, shortest_path_order, SearchResult};
use crate::simgen::{generate, sample_benchmark_params};
use crate::stats::{self, derive_seed};

/// Share of failed trials above which a cell is flagged invalid.
pub const MAX_FAILED_SHARE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    PlrSpp,
    PlrDirect,
    KnnSpp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::PlrSpp => "PLR_SPP",
            Method::PlrDirect => "PLR_DIRECT",
            Method::KnnSpp => "KNN_SPP",
        }
    }

    fn run(self, data: &Dataset, prior: &PriorKnowledge, k_rule: KRule) -> Result<SearchResult> {
        match self {
            Method::PlrSpp => shortest_path_order(data, &MeasureConfig::plr(), prior),
            Method::PlrDirect => direct_lingam_order(data, &MeasureConfig::plr(), prior),
            Method::KnnSpp => shortest_path_order(data, &MeasureConfig::knn(k_rule), prior),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfounderMode {
    #[default]
    Both,
    #[serde(rename = "true")]
    With,
    #[serde(rename = "false")]
    Without,
}

impl ConfounderMode {
    fn flags(self) -> &'static [bool] {
        match self {
            ConfounderMode::Both => &[false, true],
            ConfounderMode::With => &[true],
            ConfounderMode::Without => &[false],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub p_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub with_confounders: ConfounderMode,
    pub prior_fracs: Vec<f64>,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub parallelism: usize,
    /// Wall-clock timings make the output run-dependent, so they are opt-in.
    pub record_timings: bool,
    pub k_rule: KRule,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            p_values: vec![5],
            n_values: vec![1000],
            trials: 250,
            methods: vec![Method::PlrSpp, Method::PlrDirect],
            with_confounders: ConfounderMode::Both,
            prior_fracs: vec![0.0],
            seed: 0,
            parallelism: 0,
            record_timings: false,
            k_rule: KRule::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.p_values.is_empty() || self.n_values.is_empty() || self.methods.is_empty() || self.prior_fracs.is_empty() {
            return bad("p_values, n_values, methods and prior_fracs must be nonempty");
        }
        if self.p_values.iter().any(|&p| p < 2) {
            return bad("every p must be at least 2");
        }
        if self.prior_fracs.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return bad("prior fractions must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Outcome of one method on one dataset at one prior fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub method: Method,
    pub p: usize,
    pub n: usize,
    pub confounded: bool,
    pub prior_frac: f64,
    pub trial: usize,
    pub e_o: Option<f64>,
    pub edges_evaluated: Option<usize>,
    pub runtime: Option<Duration>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub method: Method,
    pub p: usize,
    pub n: usize,
    pub confounded: bool,
    pub prior_frac: f64,
    pub trials: usize,
    pub failed: usize,
    pub valid: bool,
    pub mean_eo: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
    pub mean_edges: Option<f64>,
}

/// Seed of the dataset for one trial. Method and prior fraction are left
/// out so every method and fraction sees the same datasets.
pub fn trial_seed(seed: u64, p: usize, n: usize, confounded: bool, trial: usize) -> u64 {
    derive_seed(&[seed, p as u64, n as u64, u64::from(confounded), trial as u64])
}

/// Prior pinning the true relative order of `round(frac * p)` variables.
/// The variables are a prefix of one shuffle per trial, so larger fractions
/// extend smaller ones.
pub fn prior_for_fraction(truth: &GroundTruth, frac: f64, seed: u64) -> Result<PriorKnowledge> {
    let p = truth.true_order.len();
    let k = (frac * p as f64).round() as usize;
    if k < 2 {
        return Ok(PriorKnowledge::none());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 0x0050_5249_4f52]));
    let mut ranks: Vec<usize> = (0..p).collect();
    ranks.shuffle(&mut rng);
    let mut chosen = ranks[..k.min(p)].to_vec();
    chosen.sort_unstable();
    let sequence: Vec<usize> = chosen.iter().map(|&r| truth.true_order[r]).collect();
    expand_prior(&[sequence])
}

fn run_dataset(config: &BenchConfig, p: usize, n: usize, confounded: bool, trial: usize) -> Vec<TrialResult> {
    let seed = trial_seed(config.seed, p, n, confounded, trial);
    let params = sample_benchmark_params(p, n, confounded, seed);
    let generated = generate(&params);
    let mut out = Vec::with_capacity(config.prior_fracs.len() * config.methods.len());
    for &prior_frac in &config.prior_fracs {
        for &method in &config.methods {
            let outcome = generated.as_ref().map_err(Clone::clone).and_then(|(data, truth)| {
                let prior = prior_for_fraction(truth, prior_frac, seed)?;
                let r = method.run(data, &prior, config.k_rule)?;
                Ok((ordering_error(&r.order.order, &truth.true_order)?.e_o, r))
            });
            let mut row = TrialResult {
                method,
                p,
                n,
                confounded,
                prior_frac,
                trial,
                e_o: None,
                edges_evaluated: None,
                runtime: None,
                error: None,
            };
            match outcome {
                Ok((e_o, r)) => {
                    row.e_o = Some(e_o);
                    row.edges_evaluated = Some(r.edges_evaluated);
                    row.runtime = config.record_timings.then_some(r.wall_time);
                }
                Err(e) => {
                    log::warn!("{} p={p} n={n} trial {trial}: {e}", method.name());
                    row.error = Some(e.to_string());
                }
            }
            out.push(row);
        }
    }
    out
}

/// Every trial of the grid, ordered by (p, n, confounded, trial, prior
/// fraction, method) regardless of parallelism.
pub fn run_trials(config: &BenchConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &p in &config.p_values {
        for &n in &config.n_values {
            for &confounded in config.with_confounders.flags() {
                for t in 0..config.trials {
                    jobs.push((p, n, confounded, t));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    let nested: Vec<Vec<TrialResult>> = pool.install(|| {
        jobs.par_iter().map(|&(p, n, c, t)| run_dataset(config, p, n, c, t)).collect()
    });
    Ok(nested.into_iter().flatten().collect())
}

/// Per-cell means over the successful trials.
pub fn aggregate(config: &BenchConfig, trials: &[TrialResult]) -> Vec<BenchCell> {
    let mut cells = Vec::new();
    for &p in &config.p_values {
        for &n in &config.n_values {
            for &confounded in config.with_confounders.flags() {
                for &prior_frac in &config.prior_fracs {
                    for &method in &config.methods {
                        let rows: Vec<&TrialResult> = trials
                            .iter()
                            .filter(|r| {
                                r.method == method
                                    && r.p == p
                                    && r.n == n
                                    && r.confounded == confounded
                                    && r.prior_frac == prior_frac
                            })
                            .collect();
                        cells.push(summarize(method, p, n, confounded, prior_frac, &rows));
                    }
                }
            }
        }
    }
    cells
}

fn summarize(method: Method, p: usize, n: usize, confounded: bool, prior_frac: f64, rows: &[&TrialResult]) -> BenchCell {
    let ok: Vec<&&TrialResult> = rows.iter().filter(|r| r.e_o.is_some()).collect();
    let failed = rows.len() - ok.len();
    let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| stats::mean(&xs));
    let runtimes: Vec<f64> = ok.iter().filter_map(|r| r.runtime).map(|d| d.as_secs_f64() * 1e3).collect();
    BenchCell {
        method,
        p,
        n,
        confounded,
        prior_frac,
        trials: rows.len(),
        failed,
        valid: (failed as f64) <= MAX_FAILED_SHARE * rows.len() as f64,
        mean_eo: mean(ok.iter().filter_map(|r| r.e_o).collect()),
        mean_runtime_ms: mean(runtimes),
        mean_edges: mean(ok.iter().filter_map(|r| r.edges_evaluated.map(|e| e as f64)).collect()),
    }
}

pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchCell>> {
    let trials = run_trials(config)?;
    let cells = aggregate(config, &trials);
    for c in cells.iter().filter(|c| !c.valid) {
        log::warn!(
            "{} p={} n={} confounded={} prior={}: {} of {} trials failed",
            c.method.name(),
            c.p,
            c.n,
            c.confounded,
            c.prior_frac,
            c.failed,
            c.trials
        );
    }
    Ok(cells)
}

/// Two-sided paired t-test on `a - b`. Returns `(t, p_value)`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParams("paired t-test needs at least 2 pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().all(|&v| v == 0.0) {
        return Ok((0.0, 1.0));
    }
    let n = d.len() as f64;
    let mean = stats::mean(&d);
    let sd = (stats::variance(&d) * n / (n - 1.0)).sqrt();
    // constant differences up to rounding, e.g. a = b + 1 computed in floats
    let scale = d.iter().fold(0f64, |m, v| m.max(v.abs()));
    if sd <= 1e-12 * scale {
        return Err(Error::DegeneratePairs);
    }
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok((t, (2.0 * dist.sf(t.abs())).min(1.0)))
}

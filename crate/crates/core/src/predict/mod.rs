//! Nearest-neighbour predictors of graph properties from moment features.

mod roc;
mod training;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use roc::{roc_summary, RocSummary};
pub use training::{build_training_set, simulate_trials, PathSampling, Target, TrainingConfig, TrialRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub p: usize,
    pub seed: u64,
    pub target: Target,
}

/// One training row: a moment-feature vector and its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledFeatures {
    pub features: Vec<f64>,
    pub label: f64,
    pub meta: FeatureMeta,
}

/// `ceil(sqrt(n))`, at least 1.
pub fn default_k(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}

/// Training rows with per-feature z-score statistics. A feature with zero
/// spread keeps unit scale so it contributes nothing to distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub feature_mean: Vec<f64>,
    pub feature_std: Vec<f64>,
    pub train: Vec<LabeledFeatures>,
}

impl KnnModel {
    pub fn fit(train: Vec<LabeledFeatures>) -> Result<Self> {
        let first = train.first().ok_or(Error::EmptyTrainingSet)?;
        let d = first.features.len();
        if let Some(row) = train.iter().find(|r| r.features.len() != d) {
            return Err(Error::LengthMismatch { left: row.features.len(), right: d });
        }
        let n = train.len() as f64;
        let mut mean = vec![0.0; d];
        for row in &train {
            for (m, v) in mean.iter_mut().zip(&row.features) {
                *m += v / n;
            }
        }
        let mut std = vec![0.0; d];
        for row in &train {
            for ((s, v), m) in std.iter_mut().zip(&row.features).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        for s in &mut std {
            *s = if *s > 0.0 && s.is_finite() { s.sqrt() } else { 1.0 };
        }
        Ok(Self { feature_mean: mean, feature_std: std, train })
    }

    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    /// Indices of the `k` nearest training rows, ties broken by index.
    pub fn neighbours(&self, query: &[f64], k: usize) -> Result<Vec<usize>> {
        if self.train.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if k == 0 || k > self.train.len() {
            return Err(Error::InvalidK { k, n: self.train.len() });
        }
        if query.len() != self.feature_mean.len() {
            return Err(Error::LengthMismatch { left: query.len(), right: self.feature_mean.len() });
        }
        let z = |xs: &[f64]| -> Vec<f64> {
            xs.iter().zip(&self.feature_mean).zip(&self.feature_std).map(|((x, m), s)| (x - m) / s).collect()
        };
        let zq = z(query);
        let mut dist: Vec<(f64, usize)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = z(&row.features).iter().zip(&zq).map(|(a, b)| (a - b).powi(2)).sum();
                (d2, i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(dist.into_iter().take(k).map(|(_, i)| i).collect())
    }

    /// Share of the `k` nearest rows labelled 1.
    pub fn classify(&self, query: &[f64], k: usize) -> Result<f64> {
        let hits = self.neighbours(query, k)?.into_iter().filter(|&i| self.train[i].label == 1.0).count();
        Ok(hits as f64 / k as f64)
    }

    /// Mean label of the `k` nearest rows.
    pub fn regress(&self, query: &[f64], k: usize) -> Result<f64> {
        let idx = self.neighbours(query, k)?;
        Ok(idx.iter().map(|&i| self.train[i].label).sum::<f64>() / k as f64)
    }
}

pub fn knn_classify(train: &[LabeledFeatures], query: &[f64], k: usize) -> Result<f64> {
    KnnModel::fit(train.to_vec())?.classify(query, k)
}

pub fn knn_regress(train: &[LabeledFeatures], query: &[f64], k: usize) -> Result<f64> {
    KnnModel::fit(train.to_vec())?.regress(query, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row(features: Vec<f64>, label: f64) -> LabeledFeatures {
        LabeledFeatures { features, label, meta: FeatureMeta { p: 0, seed: 0, target: Target::Confounder } }
    }

    #[test]
    fn exact_match_and_constant_labels() {
        let train = vec![row(vec![0.0, 0.0], 0.0), row(vec![5.0, 1.0], 1.0), row(vec![9.0, 3.0], 0.0)];
        assert_eq!(knn_classify(&train, &[5.0, 1.0], 1).unwrap(), 1.0);
        assert_eq!(knn_classify(&train, &[0.0, 0.0], 1).unwrap(), 0.0);
        let zeros: Vec<_> = train.iter().map(|r| row(r.features.clone(), 0.0)).collect();
        assert_eq!(knn_classify(&zeros, &[3.0, 3.0], 2).unwrap(), 0.0);
        let c: Vec<_> = train.iter().map(|r| row(r.features.clone(), 0.25)).collect();
        assert_eq!(knn_regress(&c, &[1.0, 2.0], 2).unwrap(), 0.25);
        assert!((knn_regress(&train, &[1.0, 2.0], 3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(knn_classify(&[], &[1.0], 1), Err(Error::EmptyTrainingSet));
        let train = vec![row(vec![0.0], 0.0)];
        assert!(matches!(knn_classify(&train, &[0.0], 2), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn separable_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut draw = |label: f64| {
            let c = if label == 1.0 { 3.0 } else { -3.0 };
            row((0..4).map(|_| c + rng.random::<f64>()).collect(), label)
        };
        let train: Vec<_> = (0..200).map(|i| draw((i % 2) as f64)).collect();
        let test: Vec<_> = (0..100).map(|i| draw((i % 2) as f64)).collect();
        let model = KnnModel::fit(train).unwrap();
        let k = default_k(model.len());
        let scores: Vec<(f64, bool)> =
            test.iter().map(|r| (model.classify(&r.features, k).unwrap(), r.label == 1.0)).collect();
        assert!(roc_summary(&scores).unwrap().auc > 0.99);
        for (s, _) in scores {
            assert!((s * k as f64 - (s * k as f64).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_regression_grid() {
        let train: Vec<_> = (0..400).map(|i| row(vec![i as f64 / 400.0, 0.0], 2.0 * i as f64 / 400.0)).collect();
        let model = KnnModel::fit(train).unwrap();
        let test: Vec<f64> = (0..50).map(|i| (i as f64 + 0.5) / 50.0).collect();
        let mse = test
            .iter()
            .map(|&x| (model.regress(&[x, 0.0], 5).unwrap() - 2.0 * x).powi(2))
            .sum::<f64>()
            / 50.0;
        let labels: Vec<f64> = test.iter().map(|x| 2.0 * x).collect();
        assert!(mse.sqrt() < crate::stats::variance(&labels).sqrt());
    }
}

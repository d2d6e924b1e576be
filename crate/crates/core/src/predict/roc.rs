use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocSummary {
    pub auc: f64,
    /// Youden-optimal cut: a score at or above it is called positive.
    pub optimal_threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
}

/// ROC curve over the distinct scores, highest first. Tied scores move the
/// curve in one diagonal step, so the area is the usual trapezoid sum.
pub fn roc_summary(scores: &[(f64, bool)]) -> Result<RocSummary> {
    let pos = scores.iter().filter(|s| s.1).count();
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    if scores.iter().any(|s| s.0.is_nan()) {
        return Err(Error::InvalidParams("score is NaN".into()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (p, n) = (pos as f64, neg as f64);
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut auc = 0.0;
    let mut best: Option<(f64, f64, usize, usize)> = None;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let (tpr, fpr) = (tp as f64 / p, fp as f64 / n);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        (prev_tpr, prev_fpr) = (tpr, fpr);
        let j = tpr - fpr;
        if best.is_none_or(|(bj, ..)| j > bj) {
            best = Some((j, threshold, tp, fp));
        }
    }
    let (_, optimal_threshold, tp, fp) = best.expect("at least one threshold");
    let total = scores.len() as f64;
    Ok(RocSummary {
        auc,
        optimal_threshold,
        precision: tp as f64 / (tp + fp) as f64,
        recall: tp as f64 / p,
        accuracy: (tp + (neg - fp)) as f64 / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_and_tied() {
        let s = [(0.9, true), (0.8, true), (0.3, false), (0.1, false)];
        let r = roc_summary(&s).unwrap();
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.optimal_threshold, 0.8);
        assert_eq!((r.precision, r.recall, r.accuracy), (1.0, 1.0, 1.0));
        let tied = [(0.5, true), (0.5, false), (0.5, false)];
        assert_eq!(roc_summary(&tied).unwrap().auc, 0.5);
    }

    #[test]
    fn hand_computed_curve() {
        // thresholds 0.9 (tp1), 0.7 (fp1), 0.4 (tp2, fp2)
        let s = [(0.9, true), (0.7, false), (0.4, true), (0.4, false)];
        let r = roc_summary(&s).unwrap();
        // points (0,0) (0,.5) (.5,.5) (1,1): area .25 + .375
        assert!((r.auc - 0.625).abs() < 1e-15);
        assert_eq!(r.optimal_threshold, 0.9);
        assert_eq!(r.accuracy, 0.75);
    }

    #[test]
    fn single_class() {
        assert_eq!(roc_summary(&[(0.1, true), (0.2, true)]), Err(Error::SingleClass));
    }

    #[test]
    fn random_scores_near_half_and_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s: Vec<(f64, bool)> = (0..10_000).map(|_| (rng.random(), rng.random())).collect();
        let r = roc_summary(&s).unwrap();
        assert!((r.auc - 0.5).abs() < 0.03);
        let flipped: Vec<(f64, bool)> = s.iter().map(|&(x, l)| (x, !l)).collect();
        assert!((roc_summary(&flipped).unwrap().auc - (1.0 - r.auc)).abs() < 1e-9);
        let warped: Vec<(f64, bool)> = s.iter().map(|&(x, l)| (x.powi(3) - 2.0, l)).collect();
        assert!((roc_summary(&warped).unwrap().auc - r.auc).abs() < 1e-12);
    }
}

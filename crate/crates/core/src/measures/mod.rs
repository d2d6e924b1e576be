//! Independence measures used as edge weights of the ordering lattice.

mod knn;
mod plr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::SearchState;
use crate::stats;

pub use knn::{digamma, knn_mi, knn_step_cost};
pub(crate) use knn::knn_cost;
pub use plr::{approx_entropy, plr, plr_step_cost, step_cost_from_row, PlrMatrix};

/// Which independence measure weighs the lattice edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeasureKind {
    #[default]
    Plr,
    KnnMi,
}

/// Neighbour count rule for the kNN estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KRule {
    /// `ceil(0.05 N)`
    Fraction5,
    /// `ceil(0.10 N)`
    Fraction10,
    /// `ceil(sqrt(N))`
    #[default]
    SqrtN,
}

impl KRule {
    pub fn k_for(self, n: usize) -> usize {
        let n = n as f64;
        let k = match self {
            KRule::Fraction5 => (0.05 * n).ceil(),
            KRule::Fraction10 => (0.10 * n).ceil(),
            KRule::SqrtN => n.sqrt().ceil(),
        };
        (k as usize).max(1)
    }
}

/// Measure selection; `k_rule` is ignored for PLR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct MeasureConfig {
    pub kind: MeasureKind,
    pub k_rule: KRule,
}

impl MeasureConfig {
    pub fn plr() -> Self {
        Self { kind: MeasureKind::Plr, k_rule: KRule::default() }
    }

    pub fn knn(k_rule: KRule) -> Self {
        Self { kind: MeasureKind::KnnMi, k_rule }
    }
}

/// Cost of selecting `candidate` next from `state`, dispatching on the
/// configured measure.
pub fn step_cost(candidate: usize, state: &SearchState, config: &MeasureConfig) -> Result<f64> {
    match config.kind {
        MeasureKind::Plr => plr_step_cost(candidate, state),
        MeasureKind::KnnMi => knn_step_cost(candidate, state, config),
    }
}

/// Least-squares residual of `xi` regressed on `xj`:
/// `xi - cov(xi, xj) / var(xj) * xj`.
pub fn residual(xi: &[f64], xj: &[f64]) -> Result<Vec<f64>> {
    if xi.len() != xj.len() {
        return Err(Error::LengthMismatch { left: xi.len(), right: xj.len() });
    }
    if xj.len() < 2 || stats::is_constant(xj) {
        return Err(Error::ZeroVariance);
    }
    let coef = stats::covariance(xi, xj) / stats::variance(xj);
    Ok(xi.iter().zip(xj).map(|(a, b)| a - coef * b).collect())
}

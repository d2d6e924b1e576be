use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::adjacency::WeightedDag;
use crate::error::{Error, Result};
use crate::model::{check_permutation, positions, EdgeConstraints};

/// Fraction of unordered feature pairs placed in the wrong relative order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingError {
    pub e_o: f64,
    pub wrong_pairs: usize,
    pub total_pairs: usize,
}

pub fn ordering_error(estimated: &[usize], truth: &[usize]) -> Result<OrderingError> {
    if estimated.len() != truth.len() {
        return Err(Error::LengthMismatch { left: estimated.len(), right: truth.len() });
    }
    let p = truth.len();
    check_permutation(estimated, p)?;
    check_permutation(truth, p)?;
    let (pe, pt) = (positions(estimated), positions(truth));
    let mut wrong = 0;
    for a in 0..p {
        for b in a + 1..p {
            if (pe[a] < pe[b]) != (pt[a] < pt[b]) {
                wrong += 1;
            }
        }
    }
    let total = p * p.saturating_sub(1) / 2;
    let e_o = if total == 0 { 0.0 } else { wrong as f64 / total as f64 };
    Ok(OrderingError { e_o, wrong_pairs: wrong, total_pairs: total })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub required_captured: usize,
    pub required_total: usize,
    pub forbidden_captured: usize,
    pub forbidden_total: usize,
}

pub fn edge_report(dag: &WeightedDag, constraints: &EdgeConstraints) -> EdgeReport {
    let hits = |set: &BTreeSet<(usize, usize)>| set.intersection(&dag.edges).count();
    EdgeReport {
        required_captured: hits(constraints.required()),
        required_total: constraints.required().len(),
        forbidden_captured: hits(constraints.forbidden()),
        forbidden_total: constraints.forbidden().len(),
    }
}

/// Forbids every edge from a later tier into an earlier one.
pub fn tiers_to_forbidden(tiers: &[Vec<usize>]) -> Result<EdgeConstraints> {
    let mut seen = BTreeSet::new();
    for &v in tiers.iter().flatten() {
        if !seen.insert(v) {
            return Err(Error::OverlappingTiers(v));
        }
    }
    let mut forbidden = Vec::new();
    for (t, earlier) in tiers.iter().enumerate() {
        for later in &tiers[t + 1..] {
            for &l in later {
                for &e in earlier {
                    forbidden.push((l, e));
                }
            }
        }
    }
    EdgeConstraints::new([], forbidden)
}

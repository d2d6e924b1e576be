//! Causal ordering as a shortest path over the lattice of remaining-feature
//! subsets, plus the greedy (DirectLiNGAM) walk over the same lattice.
//!
//! A node of the lattice is the set of features not yet ordered. Leaving a
//! node by removing feature `c` places `c` next in the order and costs the
//! independence measure of `c` against the other remaining residuals. Every
//! root-to-goal path is a permutation, so the cheapest path is the ordering
//! whose noise terms are jointly the most independent.

mod dijkstra;
mod greedy;
mod lattice;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::residual;
use crate::model::{standardize, CausalOrder, Dataset, FeatureSet, PriorKnowledge};
use crate::stats;

pub use dijkstra::{shortest_path_on, shortest_path_order};
pub use greedy::{direct_lingam_order, direct_lingam_on};
pub use lattice::CostLattice;

/// A lattice node together with its residualized data.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub remaining: FeatureSet,
    /// One residual column per member of `remaining`, in ascending index order.
    pub residuals: Vec<Vec<f64>>,
    pub cost_from_start: f64,
}

impl SearchState {
    /// The root: every feature remaining, columns standardized.
    pub fn start(data: &Dataset) -> Result<Self> {
        let p = data.n_features();
        if p > FeatureSet::MAX_FEATURES {
            return Err(Error::InvalidDataset(format!("{p} features exceeds the supported 64")));
        }
        let std = standardize(data)?;
        Ok(Self {
            remaining: FeatureSet::full(p),
            residuals: std.columns().to_vec(),
            cost_from_start: 0.0,
        })
    }

    /// Local column of `feature` within `residuals`.
    pub fn position_of(&self, feature: usize) -> Result<usize> {
        if !self.remaining.contains(feature) {
            return Err(Error::InvalidParams(format!(
                "feature {feature} is not in {}",
                self.remaining
            )));
        }
        Ok(self.remaining.rank_of(feature))
    }

    pub fn column(&self, feature: usize) -> Option<&[f64]> {
        self.position_of(feature).ok().map(|k| self.residuals[k].as_slice())
    }
}

/// Removes `chosen` from the state and regresses it out of every remaining
/// column.
pub fn residualize(state: &SearchState, chosen: usize) -> Result<SearchState> {
    let pos = state.position_of(chosen)?;
    Ok(SearchState {
        remaining: state.remaining.without(chosen),
        residuals: residualize_columns(&state.residuals, pos)?,
        cost_from_start: state.cost_from_start,
    })
}

pub(crate) fn residualize_columns(columns: &[Vec<f64>], pos: usize) -> Result<Vec<Vec<f64>>> {
    let regressor = &columns[pos];
    if stats::is_constant(regressor) {
        return Err(Error::ZeroVariance);
    }
    columns
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != pos)
        .map(|(_, col)| residual(col, regressor))
        .collect()
}

/// Outcome of an ordering search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub order: CausalOrder,
    /// Lattice edges whose weight was requested, excluding the zero-weight
    /// edges into the goal.
    pub edges_evaluated: usize,
    pub states_expanded: usize,
    pub wall_time: Duration,
}

/// False iff some `(a, b)` in `prior` has `a` still remaining while `b` has
/// already been placed.
pub fn is_state_allowed(remaining: FeatureSet, prior: &PriorKnowledge) -> bool {
    prior
        .pairs()
        .iter()
        .all(|&(a, b)| !(remaining.contains(a) && !remaining.contains(b)))
}

/// `must_precede[b]` is the set of features that have to be placed before `b`.
#[derive(Debug, Clone)]
pub(crate) struct PriorMasks {
    must_precede: Vec<FeatureSet>,
}

impl PriorMasks {
    pub(crate) fn new(prior: &PriorKnowledge, p: usize) -> Result<Self> {
        if let Some(max) = prior.max_index() {
            if max >= p {
                return Err(Error::InvalidPrior(format!(
                    "index {max} is out of range for {p} features"
                )));
            }
        }
        let mut must_precede = vec![FeatureSet::EMPTY; p];
        for &(a, b) in prior.pairs() {
            must_precede[b] = must_precede[b].with(a);
        }
        Ok(Self { must_precede })
    }

    /// Whether `c` may be placed next from an allowed state `remaining`.
    pub(crate) fn can_select(&self, remaining: FeatureSet, c: usize) -> bool {
        !self.must_precede[c].intersects(remaining.without(c))
    }
}

pub(crate) fn validate_search_input(data: &Dataset, prior: &PriorKnowledge) -> Result<PriorMasks> {
    let p = data.n_features();
    let n = data.n_samples();
    if p < 2 {
        return Err(Error::InvalidDataset(format!("need at least 2 features, got {p}")));
    }
    if p > FeatureSet::MAX_FEATURES {
        return Err(Error::InvalidDataset(format!("{p} features exceeds the supported 64")));
    }
    if n < p + 2 {
        return Err(Error::InvalidDataset(format!("need at least {} samples, got {n}", p + 2)));
    }
    PriorMasks::new(prior, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::expand_prior;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(xs: &[usize]) -> FeatureSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn prior_skips_states_that_place_b_first() {
        // features 1, 2, 3 of the three-variable lattice map to indices 0, 1, 2;
        // "1 before 2" rules out {1, 3} (2 placed first) and {1} (2 and 3 placed)
        let prior = expand_prior(&[vec![0, 1]]).unwrap();
        let disallowed: Vec<FeatureSet> = (0u64..8)
            .map(FeatureSet::from_bits)
            .filter(|s| !is_state_allowed(*s, &prior))
            .collect();
        assert_eq!(disallowed, vec![set(&[0]), set(&[0, 2])]);
        assert!(is_state_allowed(FeatureSet::full(3), &prior));
        assert!(is_state_allowed(FeatureSet::EMPTY, &prior));
    }

    #[test]
    fn masks_agree_with_state_check() {
        let prior = expand_prior(&[vec![3, 0, 2]]).unwrap();
        let masks = PriorMasks::new(&prior, 4).unwrap();
        for bits in 0u64..16 {
            let s = FeatureSet::from_bits(bits);
            if !is_state_allowed(s, &prior) {
                continue;
            }
            for c in s.iter() {
                assert_eq!(masks.can_select(s, c), is_state_allowed(s.without(c), &prior));
            }
        }
        assert!(PriorMasks::new(&prior, 3).is_err());
    }

    #[test]
    fn residualize_orthogonalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = a.iter().map(|v| v + rng.random::<f64>()).collect();
        let c: Vec<f64> = b.iter().map(|v| v - 0.3 * rng.random::<f64>()).collect();
        let data = Dataset::with_default_names(vec![a, b, c]).unwrap();
        let start = SearchState::start(&data).unwrap();
        let next = residualize(&start, 1).unwrap();
        assert_eq!(next.remaining, set(&[0, 2]));
        for col in &next.residuals {
            assert!(stats::correlation(col, start.column(1).unwrap()).abs() < 1e-8);
        }
        let two_ways = [
            residualize(&residualize(&start, 0).unwrap(), 2).unwrap(),
            residualize(&residualize(&start, 2).unwrap(), 0).unwrap(),
        ];
        assert_eq!(two_ways[0].remaining, two_ways[1].remaining);
        assert!(residualize(&next, 1).is_err());
    }
}

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::measures::MeasureConfig;
use crate::model::{CausalOrder, Dataset, FeatureSet, PriorKnowledge};

use super::{validate_search_input, CostLattice, PriorMasks, SearchResult};

#[derive(Debug, Clone, Copy)]
struct Frontier {
    cost: f64,
    state: FeatureSet,
}

// BinaryHeap is a max-heap: the cheaper entry, then the numerically smaller
// bitset, compares as greater.
impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.state.cmp(&self.state))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

/// Minimum-cost causal ordering by Dijkstra's algorithm over the subset
/// lattice. Edge weights are evaluated only when their source node is
/// expanded, and nodes that violate `prior` are never generated.
pub fn shortest_path_order(
    data: &Dataset,
    config: &MeasureConfig,
    prior: &PriorKnowledge,
) -> Result<SearchResult> {
    let started = Instant::now();
    validate_search_input(data, prior)?;
    let mut lattice = CostLattice::new(data, *config)?;
    let mut result = shortest_path_on(&mut lattice, prior)?;
    result.wall_time = started.elapsed();
    Ok(result)
}

/// Same search on an existing lattice, reusing any weights already cached.
pub fn shortest_path_on(lattice: &mut CostLattice, prior: &PriorKnowledge) -> Result<SearchResult> {
    let started = Instant::now();
    let p = lattice.n_features();
    let masks = PriorMasks::new(prior, p)?;
    let start = FeatureSet::full(p);

    let mut dist: HashMap<FeatureSet, f64> = HashMap::new();
    let mut pred: HashMap<FeatureSet, (FeatureSet, usize, f64)> = HashMap::new();
    let mut settled: HashSet<FeatureSet> = HashSet::new();
    let mut heap = BinaryHeap::new();
    let mut edges_evaluated = 0;
    let mut states_expanded = 0;

    dist.insert(start, 0.0);
    heap.push(Frontier { cost: 0.0, state: start });

    while let Some(Frontier { cost, state }) = heap.pop() {
        if !settled.insert(state) {
            continue;
        }
        if state.is_empty() {
            let order = reconstruct(&pred, start, cost)?;
            return Ok(SearchResult {
                order,
                edges_evaluated,
                states_expanded,
                wall_time: started.elapsed(),
            });
        }
        states_expanded += 1;

        let mut relax = |next: FeatureSet, chosen: usize, weight: f64, heap: &mut BinaryHeap<Frontier>| {
            let candidate = cost + weight;
            if dist.get(&next).is_none_or(|&d| candidate < d) {
                dist.insert(next, candidate);
                pred.insert(next, (state, chosen, weight));
                heap.push(Frontier { cost: candidate, state: next });
            }
        };

        if state.len() == 1 {
            let last = state.iter().next().expect("non-empty");
            relax(FeatureSet::EMPTY, last, 0.0, &mut heap);
            continue;
        }
        for c in state.iter() {
            if !masks.can_select(state, c) {
                continue;
            }
            let next = state.without(c);
            if settled.contains(&next) {
                continue;
            }
            edges_evaluated += 1;
            let weight = lattice.step_cost(state, c)?;
            relax(next, c, weight, &mut heap);
        }
    }
    Err(Error::PriorUnsatisfiable)
}

fn reconstruct(
    pred: &HashMap<FeatureSet, (FeatureSet, usize, f64)>,
    start: FeatureSet,
    total: f64,
) -> Result<CausalOrder> {
    let mut order = Vec::new();
    let mut steps = Vec::new();
    let mut node = FeatureSet::EMPTY;
    while node != start {
        let &(parent, chosen, weight) = pred.get(&node).expect("every settled node has a parent");
        order.push(chosen);
        steps.push(weight);
        node = parent;
    }
    order.reverse();
    steps.reverse();
    CausalOrder::with_total(order, steps, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::expand_prior;
    use crate::search::is_state_allowed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chain(seed: u64, p: usize, n: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for j in 0..p {
            let col = (0..n)
                .map(|i| {
                    let e = rng.random::<f64>() - 0.5;
                    if j == 0 {
                        e
                    } else {
                        0.9 * cols[j - 1][i] + e
                    }
                })
                .collect();
            cols.push(col);
        }
        Dataset::with_default_names(cols).unwrap()
    }

    #[test]
    fn lattice_counts_for_three_features() {
        let states = (0u64..8).count();
        let paths = (0..3).flat_map(|a| (0..3).flat_map(move |b| (0..3).map(move |c| (a, b, c))))
            .filter(|&(a, b, c)| a != b && b != c && a != c)
            .count();
        assert_eq!((states, paths), (8, 6));
    }

    #[test]
    fn full_prior_pins_the_order() {
        let data = chain(1, 4, 300);
        let prior = expand_prior(&[vec![1, 2, 3]]).unwrap();
        let data3 = Dataset::with_default_names(data.columns()[..3].to_vec()).unwrap();
        let prior3 = expand_prior(&[vec![2, 0, 1]]).unwrap();
        let r = shortest_path_order(&data3, &MeasureConfig::plr(), &prior3).unwrap();
        assert_eq!(r.order.order, vec![2, 0, 1]);
        let r = shortest_path_order(&data, &MeasureConfig::plr(), &prior).unwrap();
        assert!(prior.respected_by(&r.order.order));
    }

    #[test]
    fn search_respects_lazy_bound_and_state_rules() {
        for seed in 0..5 {
            let data = chain(seed, 5, 400);
            let prior = expand_prior(&[vec![4, 1]]).unwrap();
            let r = shortest_path_order(&data, &MeasureConfig::plr(), &prior).unwrap();
            let total_edges: usize = (2..=5).map(|m| binom(5, m) * m).sum();
            assert!(r.edges_evaluated <= total_edges);
            assert!(r.edges_evaluated + 1 >= r.states_expanded);
            let mut remaining = FeatureSet::full(5);
            for &c in &r.order.order {
                remaining = remaining.without(c);
                assert!(is_state_allowed(remaining, &prior));
            }
        }
    }

    #[test]
    fn rejects_out_of_range_prior() {
        let data = chain(2, 3, 100);
        let prior = expand_prior(&[vec![0, 5]]).unwrap();
        assert!(matches!(
            shortest_path_order(&data, &MeasureConfig::plr(), &prior),
            Err(Error::InvalidPrior(_))
        ));
    }

    #[test]
    fn rejects_too_few_samples() {
        let data = chain(2, 3, 4);
        assert!(shortest_path_order(&data, &MeasureConfig::plr(), &PriorKnowledge::none()).is_err());
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
}

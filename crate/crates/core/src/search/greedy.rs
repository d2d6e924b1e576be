use std::time::Instant;

use crate::error::{Error, Result};
use crate::measures::MeasureConfig;
use crate::model::{CausalOrder, Dataset, FeatureSet, PriorKnowledge};

use super::{validate_search_input, CostLattice, PriorMasks, SearchResult};

/// DirectLiNGAM: at every node take the admissible candidate with the
/// smallest step cost (lowest index on ties) and never revisit the choice.
pub fn direct_lingam_order(
    data: &Dataset,
    config: &MeasureConfig,
    prior: &PriorKnowledge,
) -> Result<SearchResult> {
    let started = Instant::now();
    validate_search_input(data, prior)?;
    let mut lattice = CostLattice::new(data, *config)?;
    let mut result = direct_lingam_on(&mut lattice, prior)?;
    result.wall_time = started.elapsed();
    Ok(result)
}

pub fn direct_lingam_on(lattice: &mut CostLattice, prior: &PriorKnowledge) -> Result<SearchResult> {
    let started = Instant::now();
    let p = lattice.n_features();
    let masks = PriorMasks::new(prior, p)?;
    let mut remaining = FeatureSet::full(p);
    let mut order = Vec::with_capacity(p);
    let mut steps = Vec::with_capacity(p);
    let mut edges_evaluated = 0;
    let mut states_expanded = 0;

    while remaining.len() >= 2 {
        states_expanded += 1;
        let mut best: Option<(usize, f64)> = None;
        for c in remaining.iter() {
            if !masks.can_select(remaining, c) {
                continue;
            }
            edges_evaluated += 1;
            let w = lattice.step_cost(remaining, c)?;
            if best.is_none_or(|(_, b)| w < b) {
                best = Some((c, w));
            }
        }
        let (c, w) = best.ok_or(Error::PriorUnsatisfiable)?;
        order.push(c);
        steps.push(w);
        remaining = remaining.without(c);
    }
    order.extend(remaining.iter());
    steps.push(0.0);

    Ok(SearchResult {
        order: CausalOrder::new(order, steps)?,
        edges_evaluated,
        states_expanded,
        wall_time: started.elapsed(),
    })
}

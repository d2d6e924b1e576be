use std::collections::HashMap;
use std::rc::Rc;

use crate::error::Result;
use crate::measures::{knn_cost, MeasureConfig, MeasureKind, PlrMatrix};
use crate::model::{Dataset, FeatureSet};

use super::{residualize_columns, SearchState};

/// Memoized edge weights of the ordering lattice for one dataset.
///
/// Residuals of a node depend only on which features were removed. They
/// are computed canonically by removing features in ascending index order,
/// so every path into a node sees bit-identical residuals. Nothing is
/// evaluated until a weight is requested.
#[derive(Debug)]
pub struct CostLattice {
    measure: MeasureConfig,
    full: FeatureSet,
    residuals: HashMap<FeatureSet, Rc<Vec<Vec<f64>>>>,
    plr: HashMap<FeatureSet, Rc<PlrMatrix>>,
    costs: HashMap<(FeatureSet, usize), f64>,
}

impl CostLattice {
    pub fn new(data: &Dataset, measure: MeasureConfig) -> Result<Self> {
        let start = SearchState::start(data)?;
        let full = start.remaining;
        let mut residuals = HashMap::new();
        residuals.insert(full, Rc::new(start.residuals));
        Ok(Self { measure, full, residuals, plr: HashMap::new(), costs: HashMap::new() })
    }

    pub fn n_features(&self) -> usize {
        self.full.len()
    }

    pub fn measure(&self) -> MeasureConfig {
        self.measure
    }

    /// Number of distinct edge weights computed so far.
    pub fn cached_edges(&self) -> usize {
        self.costs.len()
    }

    fn residuals(&mut self, remaining: FeatureSet) -> Result<Rc<Vec<Vec<f64>>>> {
        if let Some(r) = self.residuals.get(&remaining) {
            return Ok(Rc::clone(r));
        }
        let removed = FeatureSet::from_bits(self.full.bits() & !remaining.bits());
        let last = 63 - removed.bits().leading_zeros() as usize;
        let parent = remaining.with(last);
        let parent_cols = self.residuals(parent)?;
        let r = Rc::new(residualize_columns(&parent_cols, parent.rank_of(last))?);
        self.residuals.insert(remaining, Rc::clone(&r));
        Ok(r)
    }

    /// The node `remaining` with its canonical residuals.
    pub fn state(&mut self, remaining: FeatureSet) -> Result<SearchState> {
        Ok(SearchState {
            remaining,
            residuals: self.residuals(remaining)?.as_ref().clone(),
            cost_from_start: 0.0,
        })
    }

    /// Weight of the edge that removes `candidate` from `remaining`.
    pub fn step_cost(&mut self, remaining: FeatureSet, candidate: usize) -> Result<f64> {
        debug_assert!(remaining.contains(candidate));
        if remaining.len() < 2 {
            return Ok(0.0);
        }
        if let Some(&c) = self.costs.get(&(remaining, candidate)) {
            return Ok(c);
        }
        let pos = remaining.rank_of(candidate);
        let cost = match self.measure.kind {
            MeasureKind::Plr => {
                let matrix = match self.plr.get(&remaining) {
                    Some(m) => Rc::clone(m),
                    None => {
                        let cols = self.residuals(remaining)?;
                        let m = Rc::new(PlrMatrix::from_columns(&cols)?);
                        self.plr.insert(remaining, Rc::clone(&m));
                        m
                    }
                };
                matrix.step_cost(pos)
            }
            MeasureKind::KnnMi => {
                let cols = self.residuals(remaining)?;
                knn_cost(&cols, pos, &self.measure)?
            }
        };
        self.costs.insert((remaining, candidate), cost);
        Ok(cost)
    }

    /// Step costs along `order` (the last one is the zero edge into the
    /// goal) and their left-to-right sum.
    pub fn path_cost(&mut self, order: &[usize]) -> Result<(Vec<f64>, f64)> {
        let mut remaining = self.full;
        let mut steps = Vec::with_capacity(order.len());
        let mut total = 0.0;
        for &c in order {
            let w = self.step_cost(remaining, c)?;
            total += w;
            steps.push(w);
            remaining = remaining.without(c);
        }
        Ok((steps, total))
    }
}

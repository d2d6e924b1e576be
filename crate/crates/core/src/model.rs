//! Domain types shared by the search, simulation and evaluation modules.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simgen::GenParams;
use crate::stats;

/// An `N x p` matrix of observations with column labels.
///
/// Values are stored column-major; feature identity is the column index and
/// names are carried as metadata only.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from columns. Every column must have the same,
    /// nonzero length and every entry must be finite.
    pub fn from_columns(columns: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDataset("no columns".into()));
        }
        if names.len() != columns.len() {
            return Err(Error::InvalidDataset(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "column {j} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite value at row {i}, column {j}"
                )));
            }
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate column name {name:?}")));
            }
        }
        Ok(Self { columns, names })
    }

    /// Builds a dataset from row-major values.
    pub fn from_rows(rows: &[Vec<f64>], names: Vec<String>) -> Result<Self> {
        let p = names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidDataset(format!(
                    "row {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Self::from_columns(columns, names)
    }

    /// Columns named `x0`, `x1`, ...
    pub fn with_default_names(columns: Vec<Vec<f64>>) -> Result<Self> {
        let names = default_names(columns.len());
        Self::from_columns(columns, names)
    }

    pub fn n_samples(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}

pub fn default_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

/// Rescales every column to mean 0 and (population) variance 1.
pub fn standardize(data: &Dataset) -> Result<Dataset> {
    let columns = data
        .columns
        .iter()
        .enumerate()
        .map(|(j, col)| stats::standardized(col).map_err(|_| Error::ZeroVarianceColumn(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { columns, names: data.names.clone() })
}

/// A subset of feature indices, stored as a 64-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const MAX_FEATURES: usize = 64;

    pub const EMPTY: FeatureSet = FeatureSet(0);

    pub fn full(p: usize) -> Self {
        assert!(p <= Self::MAX_FEATURES, "at most 64 features are supported");
        if p == 64 {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << p) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        FeatureSet(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Self {
        FeatureSet(self.0 & !(1u64 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: FeatureSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Position of `i` among the members, i.e. the number of members below it.
    pub fn rank_of(self, i: usize) -> usize {
        (self.0 & ((1u64 << i) - 1)).count_ones() as usize
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(FeatureSet::EMPTY, FeatureSet::with)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn check_permutation(order: &[usize], p: usize) -> Result<()> {
    if order.len() != p {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {p} features",
            order.len()
        )));
    }
    let mut seen = vec![false; p];
    for &i in order {
        if i >= p || seen[i] {
            return Err(Error::InvalidPermutation(format!("{order:?}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// A causal ordering with the per-step costs of the path that produced it.
///
/// `step_costs[k]` is the weight of the edge that selected `order[k]`; the
/// final edge into the empty set always weighs 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalOrder {
    pub order: Vec<usize>,
    pub step_costs: Vec<f64>,
    pub total_cost: f64,
}

impl CausalOrder {
    /// Sums the step costs left to right.
    pub fn new(order: Vec<usize>, step_costs: Vec<f64>) -> Result<Self> {
        let total_cost = step_costs.iter().fold(0.0, |acc, c| acc + c);
        Self::with_total(order, step_costs, total_cost)
    }

    pub fn with_total(order: Vec<usize>, step_costs: Vec<f64>, total_cost: f64) -> Result<Self> {
        let p = order.len();
        check_permutation(&order, p)?;
        if step_costs.len() != p {
            return Err(Error::InvalidPermutation(format!(
                "{} step costs for {p} features",
                step_costs.len()
            )));
        }
        if step_costs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidPermutation("step costs must be finite and nonnegative".into()));
        }
        if step_costs.last().is_some_and(|&c| c != 0.0) {
            return Err(Error::InvalidPermutation("final step cost must be 0".into()));
        }
        let sum: f64 = step_costs.iter().sum();
        if (sum - total_cost).abs() > 1e-9 {
            return Err(Error::InvalidPermutation(format!(
                "total cost {total_cost} does not match step sum {sum}"
            )));
        }
        Ok(Self { order, step_costs, total_cost })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `position[i]` is where feature `i` sits in the order.
    pub fn positions(&self) -> Vec<usize> {
        positions(&self.order)
    }
}

pub(crate) fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    pos
}

/// Ground truth of a simulated dataset, expressed in the dataset's column
/// basis: `b[i][j]` is the direct effect of column `j` on column `i` and
/// `lambda[i][l]` the loading of latent confounder `l` on column `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Vec<f64>>,
    pub true_order: Vec<usize>,
    pub params: GenParams,
}

impl GroundTruth {
    pub fn n_confounders(&self) -> usize {
        self.lambda.first().map_or(0, Vec::len)
    }

    /// Checks triangularity of `B` in the true order, the two-children rule
    /// for every confounder and full column rank of `Lambda`.
    pub fn validate(&self) -> Result<()> {
        let p = self.b.len();
        check_permutation(&self.true_order, p)?;
        let pos = positions(&self.true_order);
        for i in 0..p {
            for j in 0..p {
                if self.b[i][j] != 0.0 && pos[j] >= pos[i] {
                    return Err(Error::InvalidParams(format!(
                        "B[{i}][{j}] is nonzero but {j} does not precede {i}"
                    )));
                }
            }
        }
        let q = self.n_confounders();
        let cols: Vec<Vec<f64>> = (0..q).map(|l| self.lambda.iter().map(|r| r[l]).collect()).collect();
        for (l, col) in cols.iter().enumerate() {
            if col.iter().filter(|v| **v != 0.0).count() < 2 {
                return Err(Error::InvalidParams(format!("confounder {l} has fewer than 2 children")));
            }
        }
        if matrix_rank(&cols) != q {
            return Err(Error::InvalidParams("Lambda is not of full column rank".into()));
        }
        Ok(())
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for (i, row) in self.b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    edges.insert((j, i));
                }
            }
        }
        edges
    }
}

/// Rank of the matrix whose rows are `vectors`.
pub(crate) fn matrix_rank(vectors: &[Vec<f64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let rows = vectors.len();
    let cols = vectors[0].len();
    let m = nalgebra::DMatrix::from_fn(rows, cols, |i, j| vectors[i][j]);
    m.rank(1e-9)
}

/// Known relative orderings, stored as the transitively closed set of
/// `(a, b)` pairs meaning feature `a` precedes feature `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorKnowledge {
    pairs: BTreeSet<(usize, usize)>,
}

impl PriorKnowledge {
    pub fn none() -> Self {
        Self::default()
    }

    /// Closes `pairs` transitively, rejecting contradictions.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut succ: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::CyclicPrior(a, b));
            }
            succ.entry(a).or_default().insert(b);
            succ.entry(b).or_default();
        }
        let mut closed = BTreeSet::new();
        for &start in succ.keys() {
            let mut stack = vec![start];
            let mut seen = BTreeSet::new();
            while let Some(v) = stack.pop() {
                for &w in &succ[&v] {
                    if w == start {
                        return Err(Error::CyclicPrior(start, v));
                    }
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            closed.extend(seen.into_iter().map(|v| (start, v)));
        }
        Ok(Self { pairs: closed })
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.pairs.iter().map(|&(a, b)| a.max(b)).max()
    }

    pub fn respected_by(&self, order: &[usize]) -> bool {
        let pos = positions(order);
        self.pairs
            .iter()
            .all(|&(a, b)| a < pos.len() && b < pos.len() && pos[a] < pos[b])
    }
}

/// Converts relative orderings such as `(1, 2, 3)` into the implied pairs
/// `(1, 2), (2, 3), (1, 3)`, closed over all sequences.
pub fn expand_prior(orderings: &[Vec<usize>]) -> Result<PriorKnowledge> {
    let mut pairs = Vec::new();
    for seq in orderings {
        let mut seen = HashSet::new();
        if let Some(dup) = seq.iter().find(|i| !seen.insert(**i)) {
            return Err(Error::InvalidPrior(format!("index {dup} repeats in {seq:?}")));
        }
        for (k, &a) in seq.iter().enumerate() {
            for &b in &seq[k + 1..] {
                pairs.push((a, b));
            }
        }
    }
    PriorKnowledge::from_pairs(pairs)
}

/// Ground-truth edge sets used for evaluating a recovered graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConstraints", into = "RawConstraints")]
pub struct EdgeConstraints {
    required: BTreeSet<(usize, usize)>,
    forbidden: BTreeSet<(usize, usize)>,
}

impl EdgeConstraints {
    pub fn new(
        required: impl IntoIterator<Item = (usize, usize)>,
        forbidden: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let required: BTreeSet<_> = required.into_iter().collect();
        let forbidden: BTreeSet<_> = forbidden.into_iter().collect();
        if let Some(e) = required.intersection(&forbidden).next() {
            return Err(Error::InvalidParams(format!(
                "edge {e:?} is both required and forbidden"
            )));
        }
        Ok(Self { required, forbidden })
    }

    pub fn required(&self) -> &BTreeSet<(usize, usize)> {
        &self.required
    }

    pub fn forbidden(&self) -> &BTreeSet<(usize, usize)> {
        &self.forbidden
    }

    /// Union with another constraint set.
    pub fn merge(&self, other: &EdgeConstraints) -> Result<Self> {
        Self::new(
            self.required.iter().chain(&other.required).copied(),
            self.forbidden.iter().chain(&other.forbidden).copied(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct RawConstraints {
    #[serde(default)]
    required: Vec<[usize; 2]>,
    #[serde(default)]
    forbidden: Vec<[usize; 2]>,
}

impl TryFrom<RawConstraints> for EdgeConstraints {
    type Error = Error;

    fn try_from(raw: RawConstraints) -> Result<Self> {
        EdgeConstraints::new(
            raw.required.into_iter().map(|[c, e]| (c, e)),
            raw.forbidden.into_iter().map(|[c, e]| (c, e)),
        )
    }
}

impl From<EdgeConstraints> for RawConstraints {
    fn from(c: EdgeConstraints) -> Self {
        RawConstraints {
            required: c.required.into_iter().map(|(a, b)| [a, b]).collect(),
            forbidden: c.forbidden.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

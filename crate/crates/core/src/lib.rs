//! Causal ordering of linear non-Gaussian data by shortest-path search over
//! the lattice of feature subsets.
//!
//! Each node of the lattice is the set of features still to be ordered and
//! each edge removes one feature, weighted by how dependent that feature is
//! on the residuals of the others. The cheapest root-to-goal path is the
//! estimated causal order. The greedy DirectLiNGAM walk, path-length
//! distributions, graph-property predictors, a data simulator and an
//! experiment driver are built on the same lattice.

pub mod adjacency;
pub mod error;
pub mod experiment;
pub mod measures;
pub mod metrics;
pub mod model;
pub mod pathdist;
pub mod predict;
pub mod search;
pub mod simgen;
pub mod stats;

pub use adjacency::{estimate_adjacency, WeightedDag};
pub use error::{Error, Result};
pub use experiment::{paired_t_test, run_benchmark, BenchCell, BenchConfig, ConfounderMode, Method};
pub use measures::{KRule, MeasureConfig, MeasureKind, PlrMatrix};
pub use metrics::{edge_report, ordering_error, tiers_to_forbidden, EdgeReport, OrderingError};
pub use model::{
    expand_prior, standardize, CausalOrder, Dataset, EdgeConstraints, FeatureSet, GroundTruth, PriorKnowledge,
};
pub use pathdist::{enumerate_paths, moment_features, sample_paths, MomentFeatures, PathDistribution, PathMode};
pub use predict::{knn_classify, knn_regress, roc_summary, KnnModel, LabeledFeatures, RocSummary, Target};
pub use search::{
    direct_lingam_order, is_state_allowed, residualize, shortest_path_order, CostLattice, SearchResult, SearchState,
};
pub use simgen::{generate, sample_benchmark_params, GenParams};

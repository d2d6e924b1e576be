use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(usize),

    #[error("vector has zero variance")]
    ZeroVariance,

    #[error("variables are perfectly correlated; residual variance is zero")]
    DegenerateCorrelation,

    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid neighbour count k = {k} for {n} samples")]
    InvalidK { k: usize, n: usize },

    #[error("prior knowledge is cyclic: {0} and {1} are required to precede each other")]
    CyclicPrior(usize, usize),

    #[error("invalid prior knowledge: {0}")]
    InvalidPrior(String),

    #[error("no ordering satisfies the prior knowledge")]
    PriorUnsatisfiable,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("data generation failed: {0}")]
    GenerationFailed(String),

    #[error("design matrix for feature {feature} is singular")]
    SingularDesign { feature: usize },

    #[error("tiers overlap on feature {0}")]
    OverlappingTiers(usize),

    #[error("{p} features exceeds the enumeration cap of {cap}")]
    TooManyFeatures { p: usize, cap: usize },

    #[error("path distribution has zero variance")]
    DegenerateDistribution,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("all labels belong to a single class")]
    SingleClass,

    #[error("paired differences are constant and nonzero")]
    DegeneratePairs,
}

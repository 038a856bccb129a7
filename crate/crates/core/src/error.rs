use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entry {index} is not strictly positive ({value})")]
    NonPositiveEntry { index: usize, value: f64 },

    #[error("a composition needs at least two parts, got {0}")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("composition parts sum to {0}, expected 1")]
    NotClosed(f64),

    #[error("{0} is not a valid log-ratio vector length (must be n(n-1)/2)")]
    InvalidLogRatioLength(usize),

    #[error("log-ratios are not additively consistent (max violation {0:e})")]
    InconsistentLogRatios(f64),

    #[error("average array is not antisymmetric and additively consistent (max violation {0:e})")]
    InconsistentArray(f64),

    #[error("pairwise comparison matrix is invalid: {0}")]
    InvalidPcm(String),

    #[error("priority matrix has no rows")]
    EmptyMatrix,

    #[error("label count {labels} does not match criterion count {criteria}")]
    LabelMismatch { labels: usize, criteria: usize },

    #[error("weight vector has length {found}, expected {expected}")]
    WeightDimensionMismatch { expected: usize, found: usize },

    #[error("weight vector must be non-negative and sum to 1")]
    InvalidWeights,

    #[error("at least {required} decision-makers required, got {found}")]
    InsufficientSamples { required: usize, found: usize },

    #[error("criterion index {index} out of range for {n} criteria")]
    CriterionOutOfRange { index: usize, n: usize },

    #[error("a criterion cannot be compared with itself ({0})")]
    SameCriterion(usize),

    #[error("every decision-maker weighs criteria {i} and {j} equally")]
    AllZeroRatios { i: usize, j: usize },

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("requested {clusters} clusters for {points} decision-makers")]
    TooManyClusters { clusters: usize, points: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

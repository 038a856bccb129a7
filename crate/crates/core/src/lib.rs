//! Analysis of group decision-maker priorities as compositional data.
//!
//! Priority vectors live on the simplex, so averages, spreads and distances
//! are computed on pairwise log-ratios rather than on the raw weights:
//!
//! - [`aggregation`]: arithmetic baseline, geometric mean and the robust
//!   adaptive weighted geometric mean with per-DM weights.
//! - [`dispersion`]: compositional deviation and average-deviation arrays.
//! - [`hypothesis`]: signed-rank summaries, Bayesian signed-rank and sign
//!   tests, credal rankings.
//! - [`clustering`]: Aitchison/MADC distances and compositional K-means.

pub mod aggregation;
pub mod clustering;
pub mod composition;
pub mod dispersion;
pub mod error;
pub mod hypothesis;
pub(crate) mod stats;

pub use aggregation::{
    aggregate_amm, aggregate_awgmm, aggregate_gmm, build_average_array, check_pareto,
    AggregationMethod, AggregationResult, AwgmmOptions, Estimator, ParetoCheck,
};
pub use clustering::{
    aitchison_distance, kmeans_compositional, kmeans_compositional_from, kmeans_standard_baseline,
    madc_distance, BaselineMetric, ClusterMetric, ClusterModel, CompositionalDistance,
    KMeansOptions,
};
pub use composition::{
    array_to_composition, close, inverse_log_ratio, is_fully_consistent, log_ratio_transform,
    Composition, CompositionalAverageArray, LogRatioVector, Pcm, PriorityMatrix,
};
pub use dispersion::{
    average_deviation_array, deviation_array_mad, deviation_array_robust, deviation_array_std,
    AdEstimator, AverageDeviationArray, DeviationArray, DeviationEstimator,
};
pub use error::{Error, Result};
pub use hypothesis::{
    bayesian_signed_rank, credal_ranking, sign_test, signed_rank_summary, wilcoxon_critical_value,
    BayesOptions, CredalOrdering, CredalRanking, RankTest, Relation, SignedRankSummary,
};

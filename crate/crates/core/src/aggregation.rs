//! Aggregation of several decision-makers' priorities into one group priority vector.
//!
//! Three routes are provided:
//!
//! - [`aggregate_amm`]: column-wise arithmetic mean of the raw weights. It ignores the
//!   ratio nature of priorities and is kept only as a reference baseline.
//! - [`aggregate_gmm`]: expected pairwise log-ratios placed in a compositional average
//!   array, read back through one exponentiated column. This coincides with the
//!   normalized column-wise geometric mean.
//! - [`aggregate_awgmm`]: a Welsch M-estimate of the group log-ratio vector solved by
//!   half-quadratic iteration. Each decision-maker gets a weight `lambda_k`; those whose
//!   log-ratios sit far from the group receive weights near zero.

use serde::{Deserialize, Serialize};

use crate::composition::{
    array_to_composition, close, inverse_log_ratio, log_ratio_transform, Composition,
    CompositionalAverageArray, LogRatioVector, PriorityMatrix, ALGEBRAIC_TOL,
};
use crate::error::{Error, Result};
use crate::stats;

/// Below this the Welsch bandwidth is treated as zero (all residuals vanish).
const SIGMA_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMethod {
    Amm,
    Gmm,
    Awgmm,
}

/// Statistic applied over decision-makers to each pairwise log-ratio.
#[derive(Debug, Clone, Copy)]
pub enum Estimator<'a> {
    Mean,
    Median,
    /// Weighted mean with non-negative weights summing to one, one per decision-maker.
    Weighted(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AwgmmOptions {
    pub max_iter: usize,
    /// Stop once the largest change in the group log-ratio vector drops below this.
    pub tol: f64,
    /// Denominator of the bandwidth update; `None` means `n^2` with `n` criteria.
    pub sigma_denominator: Option<f64>,
    /// Replace the Welsch kernel with the identity, which reduces to the geometric mean.
    pub force_identity_estimator: bool,
}

impl Default for AwgmmOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-10,
            sigma_denominator: None,
            force_identity_estimator: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationResult {
    pub method: AggregationMethod,
    /// Group priorities.
    pub weights: Composition,
    /// Pairwise log-ratios of the group priorities.
    pub log_ratios: LogRatioVector,
    /// Per decision-maker weights (robust method only).
    pub lambda: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    /// Squared Welsch bandwidth after the warm start and after every iteration.
    pub sigma_trace: Option<Vec<f64>>,
}

impl AggregationResult {
    fn closed_form(method: AggregationMethod, weights: Composition) -> Self {
        Self {
            method,
            log_ratios: log_ratio_transform(&weights),
            weights,
            lambda: None,
            iterations: 0,
            converged: true,
            sigma_trace: None,
        }
    }

    /// Average array of the group log-ratios; fully consistent by construction.
    pub fn average_array(&self) -> CompositionalAverageArray {
        CompositionalAverageArray::from_log_ratios(&self.log_ratios)
    }

    /// Decision-makers whose weight is below `threshold`.
    pub fn deviants(&self, threshold: f64) -> Vec<usize> {
        self.lambda
            .iter()
            .flatten()
            .enumerate()
            .filter(|(_, &l)| l < threshold)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Column-wise arithmetic mean of the raw priorities.
pub fn aggregate_amm(w: &PriorityMatrix) -> AggregationResult {
    let k = w.n_dms() as f64;
    let means: Vec<f64> = (0..w.n_criteria())
        .map(|i| w.rows().iter().map(|r| r.get(i)).sum::<f64>() / k)
        .collect();
    let weights = close(&means).expect("mean of positive rows is positive");
    AggregationResult::closed_form(AggregationMethod::Amm, weights)
}

fn validate_dm_weights(w: &PriorityMatrix, lambda: &[f64]) -> Result<()> {
    if lambda.len() != w.n_dms() {
        return Err(Error::WeightDimensionMismatch {
            expected: w.n_dms(),
            found: lambda.len(),
        });
    }
    let total: f64 = lambda.iter().sum();
    if lambda.iter().any(|&l| l.is_nan() || l < 0.0) || (total - 1.0).abs() > ALGEBRAIC_TOL {
        return Err(Error::InvalidWeights);
    }
    Ok(())
}

/// Compositional average array: the chosen statistic of `ln(W_ki / W_kj)` over `k`.
pub fn build_average_array(
    w: &PriorityMatrix,
    estimator: Estimator<'_>,
) -> Result<CompositionalAverageArray> {
    if let Estimator::Weighted(lambda) = estimator {
        validate_dm_weights(w, lambda)?;
    }
    let n = w.n_criteria();
    Ok(CompositionalAverageArray::from_upper(n, |i, j| {
        let ratios = w.pair_log_ratios(i, j);
        match estimator {
            Estimator::Mean => stats::mean(&ratios),
            Estimator::Median => stats::median(&ratios),
            Estimator::Weighted(lambda) => stats::weighted_mean(&ratios, lambda),
        }
    }))
}

/// Geometric mean method, computed through the mean average array.
pub fn aggregate_gmm(w: &PriorityMatrix) -> AggregationResult {
    let e = build_average_array(w, Estimator::Mean).expect("mean estimator has no preconditions");
    let weights = array_to_composition(&e).expect("mean average array is consistent");
    AggregationResult {
        log_ratios: e.to_log_ratios(),
        ..AggregationResult::closed_form(AggregationMethod::Gmm, weights)
    }
}

fn weighted_mean(rows: &[LogRatioVector], lambda: &[f64]) -> Vec<f64> {
    (0..rows[0].entries().len())
        .map(|e| {
            let column: Vec<f64> = rows.iter().map(|r| r.entries()[e]).collect();
            stats::weighted_mean(&column, lambda)
        })
        .collect()
}

fn squared_residuals(rows: &[LogRatioVector], center: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| {
            r.entries()
                .iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        })
        .collect()
}

/// Adaptive weighted geometric mean.
///
/// Starting from the geometric-mean point, each iteration sets
/// `alpha_k = exp(-|r_k|^2 / sigma^2)` from the log-ratio residual `r_k`,
/// normalizes to `lambda`, moves the group log-ratios to the `lambda`-weighted mean,
/// and refreshes `sigma^2 = sum_k |r_k|^2 / n^2`.
pub fn aggregate_awgmm(w: &PriorityMatrix, opts: &AwgmmOptions) -> Result<AggregationResult> {
    let k = w.n_dms();
    if k < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            found: k,
        });
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidOption("max_iter must be at least 1".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidOption("tol must be positive".into()));
    }
    let denominator = match opts.sigma_denominator {
        Some(d) if !(d > 0.0 && d.is_finite()) => {
            return Err(Error::InvalidOption(
                "sigma denominator must be positive".into(),
            ))
        }
        Some(d) => d,
        None => (w.n_criteria() * w.n_criteria()) as f64,
    };

    let rows = w.log_ratio_rows();
    let uniform = vec![1.0 / k as f64; k];
    let mut center = weighted_mean(&rows, &uniform);
    let mut residuals = squared_residuals(&rows, &center);
    let mut sigma_sq = residuals.iter().sum::<f64>() / denominator;
    let mut trace = vec![sigma_sq];
    let mut lambda = uniform.clone();
    let mut iterations = 0;
    let mut converged = false;

    if sigma_sq < SIGMA_FLOOR {
        // Every decision-maker sits on the warm start; nothing to reweight.
        converged = true;
    } else {
        while iterations < opts.max_iter {
            iterations += 1;
            if opts.force_identity_estimator {
                lambda.clone_from(&uniform);
            } else {
                // Shifting by the smallest residual rescales every alpha by the same
                // factor, so lambda is unchanged and nothing underflows to zero together.
                let min = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
                let alpha: Vec<f64> = residuals
                    .iter()
                    .map(|r| (-(r - min) / sigma_sq).exp())
                    .collect();
                let total: f64 = alpha.iter().sum();
                lambda = alpha.iter().map(|a| a / total).collect();
            }
            let next = weighted_mean(&rows, &lambda);
            let delta = next
                .iter()
                .zip(&center)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            center = next;
            residuals = squared_residuals(&rows, &center);
            sigma_sq = residuals.iter().sum::<f64>() / denominator;
            trace.push(sigma_sq);
            if delta < opts.tol || sigma_sq < SIGMA_FLOOR {
                converged = true;
                break;
            }
        }
    }

    let log_ratios = LogRatioVector::new(center)?;
    let weights = inverse_log_ratio(&log_ratios)?;
    #[cfg(debug_assertions)]
    {
        let weighted_logs: Vec<f64> = (0..w.n_criteria())
            .map(|i| {
                w.rows()
                    .iter()
                    .zip(&lambda)
                    .map(|(r, l)| l * r.get(i).ln())
                    .sum()
            })
            .collect();
        let direct = crate::composition::close_exp(&weighted_logs)?;
        debug_assert!(weights
            .parts()
            .iter()
            .zip(direct.parts())
            .all(|(a, b)| (a - b).abs() < 1e-10));
    }
    Ok(AggregationResult {
        method: AggregationMethod::Awgmm,
        weights,
        log_ratios,
        lambda: Some(lambda),
        iterations,
        converged,
        sigma_trace: Some(trace),
    })
}

/// Outcome for one pair `(preferred, other)` on which every decision-maker agrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoCheck {
    pub preferred: usize,
    pub other: usize,
    pub preserved: bool,
}

/// For every unanimous strict preference, whether the group priorities keep it.
pub fn check_pareto(w: &PriorityMatrix, group: &Composition) -> Vec<ParetoCheck> {
    let n = w.n_criteria();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && w.rows().iter().all(|r| r.get(i) > r.get(j)) {
                out.push(ParetoCheck {
                    preferred: i,
                    other: j,
                    preserved: group.get(i) > group.get(j),
                });
            }
        }
    }
    out
}

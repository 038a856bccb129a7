//! Spread of a group's priorities, measured pair by pair on log-ratios.
//!
//! A [`DeviationArray`] holds one deviation per criterion pair. An
//! [`AverageDeviationArray`] packs the matching averages above the diagonal and the
//! deviations below it, so a single `n x n` table summarizes the group.

use serde::{Deserialize, Serialize};

use crate::aggregation::{aggregate_awgmm, build_average_array, AwgmmOptions, Estimator};
use crate::composition::{pairs, CompositionalAverageArray, PriorityMatrix, ALGEBRAIC_TOL};
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationEstimator {
    Std,
    Mad,
    RobustWeighted,
}

/// Symmetric, non-negative `n x n` array of pairwise log-ratio deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationArray {
    pub estimator: DeviationEstimator,
    tau: Vec<Vec<f64>>,
}

impl DeviationArray {
    fn from_pairs(
        n: usize,
        estimator: DeviationEstimator,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut tau = vec![vec![0.0; n]; n];
        for (i, j) in pairs(n) {
            let v = f(i, j);
            tau[i][j] = v;
            tau[j][i] = v;
        }
        Self { estimator, tau }
    }

    pub fn n(&self) -> usize {
        self.tau.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.tau
    }
}

/// Sample standard deviation (`K - 1` denominator) of each pairwise log-ratio.
pub fn deviation_array_std(w: &PriorityMatrix) -> Result<DeviationArray> {
    let k = w.n_dms();
    if k < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            found: k,
        });
    }
    Ok(DeviationArray::from_pairs(
        w.n_criteria(),
        DeviationEstimator::Std,
        |i, j| {
            let ratios = w.pair_log_ratios(i, j);
            let center = stats::mean(&ratios);
            let ss: f64 = ratios.iter().map(|r| (r - center) * (r - center)).sum();
            (ss / (k - 1) as f64).sqrt()
        },
    ))
}

/// Median absolute deviation of each pairwise log-ratio (no consistency constant).
pub fn deviation_array_mad(w: &PriorityMatrix) -> DeviationArray {
    DeviationArray::from_pairs(w.n_criteria(), DeviationEstimator::Mad, |i, j| {
        stats::mad(&w.pair_log_ratios(i, j))
    })
}

/// `sqrt(sum_k lambda_k (ln(W_ki / W_kj) - xi_ij)^2)` with robust DM weights `lambda`.
pub fn deviation_array_robust(
    w: &PriorityMatrix,
    lambda: &[f64],
    xi: &CompositionalAverageArray,
) -> Result<DeviationArray> {
    if lambda.len() != w.n_dms() {
        return Err(Error::WeightDimensionMismatch {
            expected: w.n_dms(),
            found: lambda.len(),
        });
    }
    if xi.n() != w.n_criteria() {
        return Err(Error::DimensionMismatch {
            expected: w.n_criteria(),
            found: xi.n(),
        });
    }
    let total: f64 = lambda.iter().sum();
    if lambda.iter().any(|&l| l.is_nan() || l < 0.0) || (total - 1.0).abs() > ALGEBRAIC_TOL {
        return Err(Error::InvalidWeights);
    }
    Ok(DeviationArray::from_pairs(
        w.n_criteria(),
        DeviationEstimator::RobustWeighted,
        |i, j| {
            let center = xi.get(i, j);
            w.pair_log_ratios(i, j)
                .iter()
                .zip(lambda)
                .map(|(r, l)| l * (r - center) * (r - center))
                .sum::<f64>()
                .sqrt()
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AdEstimator {
    Mean,
    Median,
    Awgmm(AwgmmOptions),
}

impl AdEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            AdEstimator::Mean => "mean",
            AdEstimator::Median => "median",
            AdEstimator::Awgmm(_) => "awgmm",
        }
    }
}

/// Averages above the diagonal, matching deviations below it, zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageDeviationArray {
    pub estimator: String,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl AverageDeviationArray {
    pub fn compose(
        labels: Vec<String>,
        estimator: &AdEstimator,
        average: &CompositionalAverageArray,
        deviation: &DeviationArray,
    ) -> Self {
        let n = average.n();
        let mut values = vec![vec![0.0; n]; n];
        for (i, j) in pairs(n) {
            values[i][j] = average.get(i, j);
            values[j][i] = deviation.get(i, j);
        }
        Self {
            estimator: estimator.name().to_string(),
            labels,
            values,
        }
    }

    /// Average `xi_ij` for `i < j`.
    pub fn average(&self, i: usize, j: usize) -> f64 {
        assert!(i < j);
        self.values[i][j]
    }

    /// Deviation associated with pair `{i, j}`.
    pub fn deviation(&self, i: usize, j: usize) -> f64 {
        self.values[i.max(j)][i.min(j)]
    }
}

pub fn average_deviation_array(
    w: &PriorityMatrix,
    estimator: &AdEstimator,
) -> Result<AverageDeviationArray> {
    let (average, deviation) = match estimator {
        AdEstimator::Mean => (
            build_average_array(w, Estimator::Mean)?,
            deviation_array_std(w)?,
        ),
        AdEstimator::Median => (
            build_average_array(w, Estimator::Median)?,
            deviation_array_mad(w),
        ),
        AdEstimator::Awgmm(opts) => {
            let result = aggregate_awgmm(w, opts)?;
            let lambda = result.lambda.expect("robust aggregation returns weights");
            let average = build_average_array(w, Estimator::Weighted(&lambda))?;
            let deviation = deviation_array_robust(w, &lambda, &average)?;
            (average, deviation)
        }
    };
    Ok(AverageDeviationArray::compose(
        w.labels().to_vec(),
        estimator,
        &average,
        &deviation,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn example() -> PriorityMatrix {
        PriorityMatrix::from_raw(&[
            vec![0.220, 0.435, 0.295, 0.050],
            vec![0.210, 0.434, 0.312, 0.044],
            vec![0.363, 0.312, 0.107, 0.218],
            vec![0.243, 0.386, 0.332, 0.039],
            vec![0.227, 0.381, 0.339, 0.053],
        ])
        .unwrap()
    }

    /// The same five rows to 6 decimals, matching the reference log-ratios.
    fn precise_example() -> PriorityMatrix {
        PriorityMatrix::from_raw(&[
            vec![0.220009, 0.434705, 0.295204, 0.050082],
            vec![0.210653, 0.433639, 0.311442, 0.044266],
            vec![0.363019, 0.312141, 0.107067, 0.217773],
            vec![0.243268, 0.386126, 0.332010, 0.038597],
            vec![0.226826, 0.381147, 0.339402, 0.052625],
        ])
        .unwrap()
    }

    #[test]
    fn example_std_and_mad_entries() {
        let w = example();
        assert_abs_diff_eq!(
            deviation_array_std(&w).unwrap().get(0, 2),
            0.704,
            epsilon = 0.002
        );
        assert_abs_diff_eq!(deviation_array_mad(&w).get(0, 1), 0.162, epsilon = 0.002);
    }

    #[test]
    fn example_mean_ad_array() {
        let ad = average_deviation_array(&precise_example(), &AdEstimator::Mean).unwrap();
        let upper = [-0.446, -0.035, 1.370];
        let lower = [0.351, 0.704, 0.504];
        for j in 1..4 {
            assert_abs_diff_eq!(ad.average(0, j), upper[j - 1], epsilon = 0.002);
            assert_abs_diff_eq!(ad.values[j][0], lower[j - 1], epsilon = 0.002);
        }
        assert!((0..4).all(|i| ad.values[i][i] == 0.0));
    }

    #[test]
    fn example_robust_ad_array_matches_reference_iteration() {
        // Frozen from an independent numpy implementation of the same iteration.
        let ad = average_deviation_array(&example(), &AdEstimator::Awgmm(AwgmmOptions::default()))
            .unwrap();
        assert_abs_diff_eq!(ad.average(0, 1), -0.60158411, epsilon = 1e-7);
        let expected = [
            0.10925173, 0.04853171, 0.14476787, 0.11527539, 0.12968469, 0.13480075,
        ];
        for ((i, j), e) in pairs(4).zip(expected) {
            assert_abs_diff_eq!(ad.deviation(i, j), e, epsilon = 1e-7);
        }
    }

    #[test]
    fn identical_rows_have_no_spread() {
        let row = vec![0.1, 0.6, 0.3];
        let w = PriorityMatrix::from_raw(&vec![row.clone(); 3]).unwrap();
        for est in [
            AdEstimator::Mean,
            AdEstimator::Median,
            AdEstimator::Awgmm(AwgmmOptions::default()),
        ] {
            let ad = average_deviation_array(&w, &est).unwrap();
            for (i, j) in pairs(3) {
                assert_abs_diff_eq!(ad.average(i, j), (row[i] / row[j]).ln(), epsilon = 1e-12);
                assert_eq!(ad.deviation(i, j), 0.0);
            }
        }
    }

    #[test]
    fn std_needs_two_dms() {
        let w = PriorityMatrix::from_raw(&[vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            deviation_array_std(&w),
            Err(Error::InsufficientSamples { .. })
        ));
        assert_eq!(deviation_array_mad(&w).get(0, 1), 0.0);
    }

    #[test]
    fn robust_with_concentrated_weight_is_zero() {
        let w = example();
        let lambda = [0.0, 0.0, 1.0, 0.0, 0.0];
        let xi = build_average_array(&w, Estimator::Weighted(&lambda)).unwrap();
        let tau = deviation_array_robust(&w, &lambda, &xi).unwrap();
        for (i, j) in pairs(4) {
            assert_abs_diff_eq!(tau.get(i, j), 0.0, epsilon = 1e-15);
        }
        assert!(matches!(
            deviation_array_robust(&w, &[1.0], &xi),
            Err(Error::WeightDimensionMismatch { .. })
        ));
    }

    #[test]
    fn duplicating_a_dm_can_increase_mad() {
        // ln-ratios [0, 0, l, l, l] have MAD 0; one more 0 moves the median to l/2.
        let lo = vec![0.5, 0.5];
        let hi = vec![0.9, 0.1];
        let w = PriorityMatrix::from_raw(&[lo.clone(), lo.clone(), hi.clone(), hi.clone(), hi])
            .unwrap();
        assert_eq!(deviation_array_mad(&w).get(0, 1), 0.0);
        let dup = w.select_dms(&[0, 1, 2, 3, 4, 0]);
        assert!(deviation_array_mad(&dup).get(0, 1) > 1.0);
    }

    fn priority_matrix() -> impl Strategy<Value = PriorityMatrix> {
        (2usize..10, 2usize..6).prop_flat_map(|(k, n)| {
            prop::collection::vec(prop::collection::vec(0.01f64..1.0, n), k)
                .prop_map(|raw| PriorityMatrix::from_raw(&raw).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn std_matches_two_pass_oracle(w in priority_matrix()) {
            let tau = deviation_array_std(&w).unwrap();
            let k = w.n_dms() as f64;
            for (i, j) in pairs(w.n_criteria()) {
                let xs: Vec<f64> = w.rows().iter().map(|r| r.get(i).ln() - r.get(j).ln()).collect();
                let m = xs.iter().sum::<f64>() / k;
                let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0);
                prop_assert!((tau.get(i, j) - var.sqrt()).abs() <= 1e-12);
                prop_assert_eq!(tau.get(i, j), tau.get(j, i));
            }
        }

        #[test]
        fn uniform_robust_weights_give_population_std(w in priority_matrix()) {
            let k = w.n_dms();
            let lambda = vec![1.0 / k as f64; k];
            let xi = build_average_array(&w, Estimator::Weighted(&lambda)).unwrap();
            let robust = deviation_array_robust(&w, &lambda, &xi).unwrap();
            let sample = deviation_array_std(&w).unwrap();
            let factor = ((k as f64 - 1.0) / k as f64).sqrt();
            for (i, j) in pairs(w.n_criteria()) {
                prop_assert!((robust.get(i, j) - sample.get(i, j) * factor).abs() <= 1e-12);
            }
        }

        #[test]
        fn mad_matches_sort_oracle(w in priority_matrix()) {
            let tau = deviation_array_mad(&w);
            let med = |v: &mut Vec<f64>| {
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let m = v.len() / 2;
                if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) }
            };
            for (i, j) in pairs(w.n_criteria()) {
                let mut xs = w.pair_log_ratios(i, j);
                let c = med(&mut xs);
                let mut dev: Vec<f64> = xs.iter().map(|x| (x - c).abs()).collect();
                prop_assert_eq!(tau.get(i, j), med(&mut dev));
            }
        }

        #[test]
        fn rescaling_rows_changes_no_deviation(w in priority_matrix(), c in 0.1f64..10.0) {
            let scaled: Vec<Vec<f64>> = w.rows().iter().map(|r| r.parts().iter().map(|x| x * c).collect()).collect();
            let w2 = PriorityMatrix::from_raw(&scaled).unwrap();
            let a = deviation_array_std(&w).unwrap();
            let b = deviation_array_std(&w2).unwrap();
            for (i, j) in pairs(w.n_criteria()) {
                prop_assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-12);
            }
        }
    }
}

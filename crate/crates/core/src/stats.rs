//! Small order-statistic helpers.

/// Median; the mean of the two central order statistics for even counts.
pub(crate) fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        (sorted[m - 1] + sorted[m]) / 2.0
    }
}

/// Median absolute deviation about the median, without a consistency constant.
pub(crate) fn mad(values: &[f64]) -> f64 {
    let center = median(values);
    let deviations: Vec<f64> = values.iter().map(|x| (x - center).abs()).collect();
    median(&deviations)
}

/// Mean with the summation done in sorted order, so the result does not depend
/// on the order of `values`. Offsets are taken from the smallest value, which
/// makes the mean of identical values exact.
pub(crate) fn mean(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let base = sorted[0];
    base + sorted.iter().map(|x| x - base).sum::<f64>() / values.len() as f64
}

/// `sum_k weights[k] * values[k]` for weights on the simplex, accumulated as
/// offsets from the first value.
pub(crate) fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let base = values[0];
    base + values
        .iter()
        .zip(weights)
        .map(|(x, w)| w * (x - base))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
    }

    #[test]
    fn mad_of_symmetric_sample() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 5.0]), 1.0);
        assert_eq!(mad(&[2.0, 2.0, 2.0]), 0.0);
    }
}

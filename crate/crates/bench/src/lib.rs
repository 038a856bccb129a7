//! Synthetic inputs shared by the benchmarks.

use groupcoda_core::PriorityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `k` decision-makers over `n` criteria: a common random priority vector with
/// multiplicative per-entry noise, closed row by row.
pub fn synthetic_matrix(k: usize, n: usize, seed: u64) -> PriorityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            base.iter()
                .map(|b| b * rng.random_range(0.5..2.0))
                .collect()
        })
        .collect();
    PriorityMatrix::from_raw(&rows).expect("positive synthetic weights")
}

//! Distances between compositions and K-means clustering of decision-makers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composition::{close, Composition, PriorityMatrix};
use crate::error::{Error, Result};
use crate::stats::{mean, median};

fn check_dims(w: &Composition, v: &Composition) -> Result<()> {
    if w.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// Euclidean distance between the pairwise log-ratio vectors of `w` and `v`.
pub fn aitchison_distance(w: &Composition, v: &Composition) -> Result<f64> {
    check_dims(w, v)?;
    Ok(euclidean(
        w.log_ratios().entries(),
        v.log_ratios().entries(),
    ))
}

/// Sum of absolute differences between the pairwise log-ratios of `w` and `v`.
pub fn madc_distance(w: &Composition, v: &Composition) -> Result<f64> {
    check_dims(w, v)?;
    Ok(cityblock(
        w.log_ratios().entries(),
        v.log_ratios().entries(),
    ))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn cityblock(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionalDistance {
    Aitchison,
    Madc,
}

/// Metric of the raw-weight K-means baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMetric {
    /// Squared Euclidean distance, arithmetic-mean centroids.
    Euclidean,
    /// City-block distance, component-wise median centroids.
    Cityblock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterMetric {
    Aitchison,
    Madc,
    Euclidean,
    Cityblock,
}

impl From<CompositionalDistance> for ClusterMetric {
    fn from(d: CompositionalDistance) -> Self {
        match d {
            CompositionalDistance::Aitchison => ClusterMetric::Aitchison,
            CompositionalDistance::Madc => ClusterMetric::Madc,
        }
    }
}

impl From<BaselineMetric> for ClusterMetric {
    fn from(d: BaselineMetric) -> Self {
        match d {
            BaselineMetric::Euclidean => ClusterMetric::Euclidean,
            BaselineMetric::Cityblock => ClusterMetric::Cityblock,
        }
    }
}

impl ClusterMetric {
    fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ClusterMetric::Aitchison | ClusterMetric::Euclidean => euclidean(a, b),
            ClusterMetric::Madc | ClusterMetric::Cityblock => cityblock(a, b),
        }
    }

    /// Contribution of one member at distance `d` to the inertia.
    fn loss(self, d: f64) -> f64 {
        match self {
            ClusterMetric::Aitchison | ClusterMetric::Euclidean => d * d,
            ClusterMetric::Madc | ClusterMetric::Cityblock => d,
        }
    }

    pub fn is_compositional(self) -> bool {
        matches!(self, ClusterMetric::Aitchison | ClusterMetric::Madc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl KMeansOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_iter: 300,
            restarts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub metric: ClusterMetric,
    /// One row of criterion weights per cluster.
    pub centroids: Vec<Vec<f64>>,
    pub centroid_sums: Vec<f64>,
    /// Cluster index per decision-maker.
    pub assignments: Vec<usize>,
    /// Sum of squared distances (Aitchison, Euclidean) or of distances (MADC, city-block).
    pub inertia: f64,
    /// Inertia after each centroid update of the selected run.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub seed: Option<u64>,
    /// Number of times an emptied cluster was re-seeded in the selected run.
    pub empty_clusters_resolved: usize,
    /// Set for the raw-weight baseline, whose centroids need not be compositions.
    pub fallacious_baseline: bool,
}

impl ClusterModel {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centroids.len()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

type CentroidRule<'a> = Box<dyn Fn(&[usize]) -> Vec<f64> + 'a>;

/// Data and centroid rule for one Lloyd run.
struct Space<'a> {
    metric: ClusterMetric,
    /// Points in the coordinates the metric is evaluated in.
    features: Vec<Vec<f64>>,
    centroid: CentroidRule<'a>,
}

struct Run {
    centroids: Vec<Vec<f64>>,
    assignments: Vec<usize>,
    inertia: f64,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
    resolved: usize,
}

impl Space<'_> {
    fn nearest(&self, centroids: &[Vec<f64>]) -> Vec<usize> {
        self.features
            .iter()
            .map(|p| {
                let mut best = (0, f64::INFINITY);
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = self.metric.distance(p, centroid);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best.0
            })
            .collect()
    }

    fn inertia(&self, centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
        self.features
            .iter()
            .zip(assignments)
            .map(|(p, &c)| self.metric.loss(self.metric.distance(p, &centroids[c])))
            .sum()
    }

    /// Moves the point farthest from its centroid into each empty cluster.
    fn fill_empty(&self, centroids: &[Vec<f64>], assignments: &mut [usize]) -> usize {
        let mut resolved = 0;
        loop {
            let mut sizes = vec![0usize; centroids.len()];
            for &a in assignments.iter() {
                sizes[a] += 1;
            }
            let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                return resolved;
            };
            let mut far = (None, -1.0);
            for (k, p) in self.features.iter().enumerate() {
                if sizes[assignments[k]] < 2 {
                    continue;
                }
                let d = self.metric.distance(p, &centroids[assignments[k]]);
                if d > far.1 {
                    far = (Some(k), d);
                }
            }
            let k = far.0.expect("more points than clusters");
            assignments[k] = empty;
            resolved += 1;
        }
    }

    fn members(assignments: &[usize], o: usize) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); o];
        for (k, &a) in assignments.iter().enumerate() {
            members[a].push(k);
        }
        members
    }

    fn lloyd(&self, init: Vec<Vec<f64>>, max_iter: usize) -> Run {
        let o = init.len();
        let mut centroids = init;
        let mut assignments = self.nearest(&centroids);
        let mut trace = Vec::new();
        let mut resolved = 0;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < max_iter {
            iterations += 1;
            resolved += self.fill_empty(&centroids, &mut assignments);
            centroids = Self::members(&assignments, o)
                .iter()
                .map(|m| (self.centroid)(m))
                .collect();
            trace.push(self.inertia(&centroids, &assignments));
            let next = self.nearest(&centroids);
            if next == assignments {
                converged = true;
                break;
            }
            assignments = next;
        }
        if !converged {
            // keep the returned model free of empty clusters
            resolved += self.fill_empty(&centroids, &mut assignments);
        }
        Run {
            inertia: self.inertia(&centroids, &assignments),
            centroids,
            assignments,
            trace,
            iterations,
            converged,
            resolved,
        }
    }

    /// D²-weighted seeding from the data points.
    fn seed_centroids(&self, o: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let n = self.features.len();
        let mut chosen = vec![rng.random_range(0..n)];
        let mut d2: Vec<f64> = self
            .features
            .iter()
            .map(|p| sq(self.metric.distance(p, &self.features[chosen[0]])))
            .collect();
        while chosen.len() < o {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let mut target = rng.random::<f64>() * total;
                let mut pick = None;
                for (k, &w) in d2.iter().enumerate() {
                    if w > 0.0 {
                        pick = Some(k);
                        if target < w {
                            break;
                        }
                        target -= w;
                    }
                }
                pick.expect("positive total weight")
            } else {
                // every point coincides with a chosen one
                let free: Vec<usize> = (0..n).filter(|k| !chosen.contains(k)).collect();
                free[rng.random_range(0..free.len())]
            };
            chosen.push(next);
            for (k, p) in self.features.iter().enumerate() {
                d2[k] = d2[k].min(sq(self.metric.distance(p, &self.features[next])));
            }
        }
        chosen.iter().map(|&k| self.features[k].clone()).collect()
    }

    fn best_of_restarts(&self, o: usize, opts: &KMeansOptions) -> Run {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut best: Option<Run> = None;
        for _ in 0..opts.restarts.max(1) {
            let init = self.seed_centroids(o, &mut rng);
            let run = self.lloyd(init, opts.max_iter);
            if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
                best = Some(run);
            }
        }
        best.expect("at least one restart")
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

fn check_request(w: &PriorityMatrix, o: usize, max_iter: usize) -> Result<()> {
    if o == 0 {
        return Err(Error::InvalidOption(
            "cluster count must be at least 1".into(),
        ));
    }
    if o > w.n_dms() {
        return Err(Error::TooManyClusters {
            clusters: o,
            points: w.n_dms(),
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidOption("max_iter must be positive".into()));
    }
    Ok(())
}

/// Closed geometric mean of the member rows: `C(prod_k W_k^(1/K_j))`.
fn geometric_centroid(w: &PriorityMatrix, members: &[usize]) -> Composition {
    let share = 1.0 / members.len() as f64;
    let raw: Vec<f64> = (0..w.n_criteria())
        .map(|c| {
            members
                .iter()
                .map(|&k| w.row(k).get(c).powf(share))
                .product()
        })
        .collect();
    close(&raw).expect("geometric mean of positive parts is positive")
}

fn compositional_space(w: &PriorityMatrix, distance: CompositionalDistance) -> Space<'_> {
    Space {
        metric: distance.into(),
        features: w
            .rows()
            .iter()
            .map(|r| r.log_ratios().entries().to_vec())
            .collect(),
        centroid: Box::new(move |members| {
            geometric_centroid(w, members)
                .log_ratios()
                .entries()
                .to_vec()
        }),
    }
}

fn compositional_model(
    w: &PriorityMatrix,
    run: Run,
    distance: CompositionalDistance,
    seed: Option<u64>,
) -> ClusterModel {
    let o = run.centroids.len();
    // Report centroids as weights, rebuilt from the final members.
    let centroids: Vec<Vec<f64>> = Space::members(&run.assignments, o)
        .iter()
        .map(|m| geometric_centroid(w, m).parts().to_vec())
        .collect();
    ClusterModel {
        metric: distance.into(),
        centroid_sums: centroids.iter().map(|c| c.iter().sum()).collect(),
        centroids,
        assignments: run.assignments,
        inertia: run.inertia,
        inertia_trace: run.trace,
        iterations: run.iterations,
        converged: run.converged,
        seed,
        empty_clusters_resolved: run.resolved,
        fallacious_baseline: false,
    }
}

/// K-means on compositions: assignment by a compositional distance, centroids as
/// closed geometric means, D² seeding from the data, best of `opts.restarts` runs.
pub fn kmeans_compositional(
    w: &PriorityMatrix,
    o: usize,
    distance: CompositionalDistance,
    opts: &KMeansOptions,
) -> Result<ClusterModel> {
    check_request(w, o, opts.max_iter)?;
    let space = compositional_space(w, distance);
    let run = space.best_of_restarts(o, opts);
    Ok(compositional_model(w, run, distance, Some(opts.seed)))
}

/// A single compositional K-means run from the given initial centroids.
pub fn kmeans_compositional_from(
    w: &PriorityMatrix,
    init: &[Composition],
    distance: CompositionalDistance,
    max_iter: usize,
) -> Result<ClusterModel> {
    check_request(w, init.len(), max_iter)?;
    for c in init {
        if c.dim() != w.n_criteria() {
            return Err(Error::DimensionMismatch {
                expected: w.n_criteria(),
                found: c.dim(),
            });
        }
    }
    let space = compositional_space(w, distance);
    let init = init
        .iter()
        .map(|c| c.log_ratios().entries().to_vec())
        .collect();
    let run = space.lloyd(init, max_iter);
    Ok(compositional_model(w, run, distance, None))
}

/// K-means on the raw weights, ignoring the simplex. Centroid rows need not sum
/// to one; the model is flagged as a fallacious baseline.
pub fn kmeans_standard_baseline(
    w: &PriorityMatrix,
    o: usize,
    metric: BaselineMetric,
    opts: &KMeansOptions,
) -> Result<ClusterModel> {
    check_request(w, o, opts.max_iter)?;
    let features: Vec<Vec<f64>> = w.rows().iter().map(|r| r.parts().to_vec()).collect();
    let columns = w.n_criteria();
    let space = Space {
        metric: metric.into(),
        centroid: Box::new(|members| {
            (0..columns)
                .map(|c| {
                    let column: Vec<f64> = members.iter().map(|&k| w.row(k).get(c)).collect();
                    match metric {
                        BaselineMetric::Euclidean => mean(&column),
                        BaselineMetric::Cityblock => median(&column),
                    }
                })
                .collect()
        }),
        features,
    };
    let run = space.best_of_restarts(o, opts);
    Ok(ClusterModel {
        metric: metric.into(),
        centroid_sums: run.centroids.iter().map(|c| c.iter().sum()).collect(),
        centroids: run.centroids,
        assignments: run.assignments,
        inertia: run.inertia,
        inertia_trace: run.trace,
        iterations: run.iterations,
        converged: run.converged,
        seed: Some(opts.seed),
        empty_clusters_resolved: run.resolved,
        fallacious_baseline: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{inverse_log_ratio, log_ratio_transform, LogRatioVector};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand_distr::{Distribution, Normal};

    fn comp(parts: &[f64]) -> Composition {
        close(parts).unwrap()
    }

    #[test]
    fn single_pair_distances() {
        let (a, b) = (comp(&[0.75, 0.25]), comp(&[0.25, 0.75]));
        let expected = 2.0 * 3f64.ln();
        assert_abs_diff_eq!(
            aitchison_distance(&a, &b).unwrap(),
            expected,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(madc_distance(&a, &b).unwrap(), expected, epsilon = 1e-14);
        assert_eq!(aitchison_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(madc_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let (a, b) = (comp(&[0.5, 0.5]), comp(&[0.2, 0.3, 0.5]));
        assert!(matches!(
            aitchison_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(madc_distance(&a, &b).is_err());
    }

    /// Two blobs jittered in log-ratio space around known centers.
    fn two_blobs(seed: u64, per_blob: usize) -> (PriorityMatrix, Vec<usize>, [Composition; 2]) {
        let centers = [comp(&[0.6, 0.25, 0.1, 0.05]), comp(&[0.05, 0.15, 0.3, 0.5])];
        let noise = Normal::new(0.0, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for k in 0..2 * per_blob {
            let blob = k % 2;
            let raw: Vec<f64> = centers[blob]
                .parts()
                .iter()
                .map(|p| (p.ln() + noise.sample(&mut rng)).exp())
                .collect();
            rows.push(close(&raw).unwrap());
            truth.push(blob);
        }
        (PriorityMatrix::from_rows(rows).unwrap(), truth, centers)
    }

    #[test]
    fn separates_two_blobs() {
        for seed in 0..20 {
            let (w, truth, centers) = two_blobs(seed, 15);
            for distance in [
                CompositionalDistance::Aitchison,
                CompositionalDistance::Madc,
            ] {
                let model =
                    kmeans_compositional(&w, 2, distance, &KMeansOptions::new(seed)).unwrap();
                let flip = model.assignments[0] != truth[0];
                for (a, t) in model.assignments.iter().zip(&truth) {
                    assert_eq!((*a == 1) ^ flip, *t == 1, "seed {seed}");
                }
                for (c, centroid) in model.centroids.iter().enumerate() {
                    let blob = if flip { 1 - c } else { c };
                    let d = aitchison_distance(&comp(centroid), &centers[blob]).unwrap();
                    assert!(d < 0.1, "seed {seed}: centroid {c} off by {d}");
                    assert!((model.centroid_sums[c] - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_cluster_per_dm_has_zero_inertia() {
        let (w, _, _) = two_blobs(3, 4);
        let model = kmeans_compositional(
            &w,
            w.n_dms(),
            CompositionalDistance::Aitchison,
            &KMeansOptions::new(1),
        )
        .unwrap();
        assert_abs_diff_eq!(model.inertia, 0.0, epsilon = 1e-20);
        let mut seen = model.assignments.clone();
        seen.sort();
        assert_eq!(seen, (0..w.n_dms()).collect::<Vec<_>>());
    }

    #[test]
    fn cluster_count_validation() {
        let (w, _, _) = two_blobs(0, 2);
        let opts = KMeansOptions::new(0);
        assert_eq!(
            kmeans_compositional(&w, 5, CompositionalDistance::Aitchison, &opts),
            Err(Error::TooManyClusters {
                clusters: 5,
                points: 4
            })
        );
        assert!(kmeans_compositional(&w, 0, CompositionalDistance::Aitchison, &opts).is_err());
        assert!(kmeans_standard_baseline(&w, 9, BaselineMetric::Euclidean, &opts).is_err());
    }

    #[test]
    fn duplicated_points_never_leave_empty_clusters() {
        let rows = vec![comp(&[0.2, 0.8]); 3];
        let w = PriorityMatrix::from_rows(rows).unwrap();
        let model = kmeans_compositional(
            &w,
            3,
            CompositionalDistance::Aitchison,
            &KMeansOptions::new(4),
        )
        .unwrap();
        assert!(model.cluster_sizes().iter().all(|&s| s == 1));
        assert!(model.empty_clusters_resolved > 0);
    }

    #[test]
    fn baseline_with_constant_clusters_recovers_them() {
        let a = [0.7, 0.2, 0.1];
        let b = [0.1, 0.3, 0.6];
        let raw: Vec<Vec<f64>> = (0..8)
            .map(|k| if k < 4 { a.to_vec() } else { b.to_vec() })
            .collect();
        let w = PriorityMatrix::from_raw(&raw).unwrap();
        for metric in [BaselineMetric::Euclidean, BaselineMetric::Cityblock] {
            let model = kmeans_standard_baseline(&w, 2, metric, &KMeansOptions::new(2)).unwrap();
            assert!(model.fallacious_baseline);
            let mut centroids = model.centroids.clone();
            centroids.sort_by(|x, y| y[0].total_cmp(&x[0]));
            for (got, want) in centroids.iter().zip([&a, &b]) {
                for (g, w) in got.iter().zip(want.iter()) {
                    assert_abs_diff_eq!(*g, *w, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn baseline_mean_centroids_can_leave_simplex_with_median() {
        // component-wise medians of compositions need not sum to one
        let raw = vec![
            vec![0.6, 0.3, 0.1],
            vec![0.1, 0.6, 0.3],
            vec![0.3, 0.1, 0.6],
        ];
        let w = PriorityMatrix::from_raw(&raw).unwrap();
        let model =
            kmeans_standard_baseline(&w, 1, BaselineMetric::Cityblock, &KMeansOptions::new(0))
                .unwrap();
        assert_abs_diff_eq!(model.centroid_sums[0], 0.9, epsilon = 1e-12);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let (w, _, _) = two_blobs(9, 10);
        let opts = KMeansOptions::new(77);
        for distance in [
            CompositionalDistance::Aitchison,
            CompositionalDistance::Madc,
        ] {
            assert_eq!(
                kmeans_compositional(&w, 3, distance, &opts).unwrap(),
                kmeans_compositional(&w, 3, distance, &opts).unwrap()
            );
        }
        assert_eq!(
            kmeans_standard_baseline(&w, 3, BaselineMetric::Euclidean, &opts).unwrap(),
            kmeans_standard_baseline(&w, 3, BaselineMetric::Euclidean, &opts).unwrap()
        );
    }

    /// Independent K-means in log-ratio coordinates: Euclidean assignment,
    /// arithmetic-mean centroids, same stopping rule.
    fn log_ratio_kmeans(
        points: &[Vec<f64>],
        init: Vec<Vec<f64>>,
        max_iter: usize,
    ) -> (Vec<usize>, Vec<Vec<f64>>) {
        let assign = |cs: &[Vec<f64>]| -> Vec<usize> {
            points
                .iter()
                .map(|p| {
                    let d: Vec<f64> = cs
                        .iter()
                        .map(|c| p.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                        .collect();
                    (0..cs.len()).fold(0, |best, c| if d[c] < d[best] { c } else { best })
                })
                .collect()
        };
        let mut centroids = init;
        let mut labels = assign(&centroids);
        for _ in 0..max_iter {
            centroids = (0..centroids.len())
                .map(|c| {
                    let members: Vec<&Vec<f64>> = points
                        .iter()
                        .zip(&labels)
                        .filter(|(_, &l)| l == c)
                        .map(|(p, _)| p)
                        .collect();
                    (0..points[0].len())
                        .map(|e| members.iter().map(|m| m[e]).sum::<f64>() / members.len() as f64)
                        .collect()
                })
                .collect();
            let next = assign(&centroids);
            if next == labels {
                break;
            }
            labels = next;
        }
        (labels, centroids)
    }

    #[test]
    fn aitchison_kmeans_equals_log_ratio_kmeans() {
        for seed in 0..10 {
            let (w, _, _) = two_blobs(100 + seed, 12);
            let init: Vec<Composition> = [0, 5, 11].iter().map(|&k| w.row(k).clone()).collect();
            let model = kmeans_compositional_from(&w, &init, CompositionalDistance::Aitchison, 300)
                .unwrap();
            let points: Vec<Vec<f64>> = w
                .rows()
                .iter()
                .map(|r| log_ratio_transform(r).entries().to_vec())
                .collect();
            let lr_init = init
                .iter()
                .map(|c| log_ratio_transform(c).entries().to_vec())
                .collect();
            let (labels, centroids) = log_ratio_kmeans(&points, lr_init, 300);
            assert_eq!(model.assignments, labels);
            for (got, lr) in model.centroids.iter().zip(centroids) {
                let want = inverse_log_ratio(&LogRatioVector::new(lr).unwrap()).unwrap();
                for (g, x) in got.iter().zip(want.parts()) {
                    assert_abs_diff_eq!(*g, *x, epsilon = 1e-10);
                }
            }
        }
    }

    fn simplex(n: usize) -> impl Strategy<Value = Composition> {
        prop::collection::vec(0.01f64..1.0, n).prop_map(|v| close(&v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn aitchison_is_a_metric(
            (a, b, c) in (2usize..7).prop_flat_map(|n| (simplex(n), simplex(n), simplex(n)))
        ) {
            let d = |x: &Composition, y: &Composition| aitchison_distance(x, y).unwrap();
            prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12);
            prop_assert!(d(&a, &a) <= 1e-12);
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
            let m = |x: &Composition, y: &Composition| madc_distance(x, y).unwrap();
            prop_assert!(m(&a, &c) <= m(&a, &b) + m(&b, &c) + 1e-12);
        }

        #[test]
        fn aitchison_is_log_ratio_norm(
            (a, b) in (2usize..7).prop_flat_map(|n| (simplex(n), simplex(n)))
        ) {
            let lr = log_ratio_transform(&a).squared_distance(&log_ratio_transform(&b)).sqrt();
            prop_assert!((aitchison_distance(&a, &b).unwrap() - lr).abs() <= 1e-14);
        }

        #[test]
        fn distances_ignore_scale_and_criterion_order(
            (a, b) in (3usize..7).prop_flat_map(|n| (simplex(n), simplex(n))),
            s in 0.1f64..10.0,
        ) {
            let scaled: Vec<f64> = a.parts().iter().map(|x| x * s).collect();
            let a2 = close(&scaled).unwrap();
            prop_assert!((aitchison_distance(&a, &b).unwrap() - aitchison_distance(&a2, &b).unwrap()).abs() <= 1e-12);
            let n = a.dim();
            let perm: Vec<usize> = (0..n).rev().collect();
            let (pa, pb) = (a.permute(&perm), b.permute(&perm));
            prop_assert!((madc_distance(&a, &b).unwrap() - madc_distance(&pa, &pb).unwrap()).abs() <= 1e-12);
            prop_assert!((aitchison_distance(&a, &b).unwrap() - aitchison_distance(&pa, &pb).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn inertia_never_increases(
            rows in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 4), 6..30),
            o in 1usize..4,
            seed in any::<u64>(),
        ) {
            let w = PriorityMatrix::from_raw(&rows).unwrap();
            let model = kmeans_compositional(&w, o, CompositionalDistance::Aitchison, &KMeansOptions::new(seed)).unwrap();
            if model.empty_clusters_resolved == 0 {
                for pair in model.inertia_trace.windows(2) {
                    prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-15);
                }
            }
            for s in &model.centroid_sums {
                prop_assert!((s - 1.0).abs() <= 1e-12);
            }
            prop_assert!(model.cluster_sizes().iter().all(|&c| c > 0));
        }
    }
}

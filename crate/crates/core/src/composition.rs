//! Simplex data types, closure and pairwise log-ratio transforms.
//!
//! Every vector of priorities handled by this crate is a [`Composition`]: strictly
//! positive parts closed to unit sum. Only ratios between parts carry information,
//! so most computations go through the pairwise log-ratio representation
//! ([`LogRatioVector`]) whose entries are `ln(w_i / w_j)` for `i < j`, in
//! lexicographic pair order `(0,1), (0,2), ..., (n-2,n-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for exact algebraic identities (closure, antisymmetry, round trips).
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Tolerance for additive consistency of arrays produced by iterative routines.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Number of unordered criterion pairs for `n` criteria.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the pair `(i, j)`, `i < j < n`, in lexicographic order.
pub fn pair_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j`, lexicographically.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Inverse of [`pair_count`]: the `n` with `n(n-1)/2 == m`, if any.
pub fn dimension_from_pair_count(m: usize) -> Option<usize> {
    let mut n = 2;
    while pair_count(n) < m {
        n += 1;
    }
    (pair_count(n) == m).then_some(n)
}

fn sum(values: &[f64]) -> f64 {
    values.iter().sum()
}

/// A vector of strictly positive parts summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Composition {
    parts: Vec<f64>,
}

impl Composition {
    /// Wraps parts that are already closed, without renormalizing them.
    pub fn from_closed(parts: Vec<f64>) -> Result<Self> {
        validate_positive(&parts)?;
        let total = sum(&parts);
        if (total - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotClosed(total));
        }
        Ok(Self { parts })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        close(&vec![1.0; n])
    }

    pub fn parts(&self) -> &[f64] {
        &self.parts
    }

    /// Number of parts.
    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.parts[i]
    }

    pub fn log_ratios(&self) -> LogRatioVector {
        log_ratio_transform(self)
    }

    /// Reorders parts so that part `k` of the result is part `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        Self {
            parts: perm.iter().map(|&p| self.parts[p]).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<f64>) -> Result<Self> {
        Self::from_closed(parts)
    }
}

impl From<Composition> for Vec<f64> {
    fn from(c: Composition) -> Self {
        c.parts
    }
}

fn validate_positive(raw: &[f64]) -> Result<()> {
    if raw.len() < 2 {
        return Err(Error::DimensionTooSmall(raw.len()));
    }
    match raw.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        Some(index) => Err(Error::NonPositiveEntry {
            index,
            value: raw[index],
        }),
        None => Ok(()),
    }
}

/// Closes a positive vector to unit sum.
pub fn close(raw: &[f64]) -> Result<Composition> {
    validate_positive(raw)?;
    // Sums within rounding noise of 1 count as closed and pass through
    // untouched, which makes closure idempotent bit for bit.
    let slack = raw.len() as f64 * f64::EPSILON;
    let mut parts = raw.to_vec();
    for _ in 0..4 {
        let t = sum(&parts);
        if (t - 1.0).abs() <= slack {
            break;
        }
        parts.iter_mut().for_each(|x| *x /= t);
    }
    Ok(Composition { parts })
}

/// Pairwise log-ratios `ln(w_i / w_j)` for `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LogRatioVector {
    n: usize,
    entries: Vec<f64>,
}

impl LogRatioVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let n = dimension_from_pair_count(entries.len())
            .ok_or(Error::InvalidLogRatioLength(entries.len()))?;
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; pair_count(n)],
        }
    }

    /// Number of criteria the vector describes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `ln(w_i / w_j)` for any ordered pair, extended antisymmetrically.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.entries[pair_index(i, j, self.n)],
            Greater => -self.entries[pair_index(j, i, self.n)],
            Equal => 0.0,
        }
    }

    /// Largest violation of `v_ij = v_ik + v_kj` over all triples.
    pub fn consistency_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for (i, j) in pairs(n) {
            for k in 0..n {
                let v = (self.get(i, j) - self.get(i, k) - self.get(k, j)).abs();
                worst = worst.max(v);
            }
        }
        worst
    }

    pub fn squared_distance(&self, other: &LogRatioVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl TryFrom<Vec<f64>> for LogRatioVector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<LogRatioVector> for Vec<f64> {
    fn from(v: LogRatioVector) -> Self {
        v.entries
    }
}

pub fn log_ratio_transform(w: &Composition) -> LogRatioVector {
    let n = w.dim();
    let entries = pairs(n)
        .map(|(i, j)| (w.parts[i] / w.parts[j]).ln())
        .collect();
    LogRatioVector { n, entries }
}

/// Maps an additively consistent log-ratio vector back onto the simplex.
///
/// The first column `ln(w_i / w_0) = -v_0i` is exponentiated and closed.
pub fn inverse_log_ratio(v: &LogRatioVector) -> Result<Composition> {
    let violation = v.consistency_violation();
    if violation > CONSISTENCY_TOL {
        return Err(Error::InconsistentLogRatios(violation));
    }
    let column: Vec<f64> = (0..v.n).map(|i| v.get(i, 0)).collect();
    close_exp(&column)
}

/// `close(exp(x))`, shifted by the maximum for overflow safety.
pub(crate) fn close_exp(logs: &[f64]) -> Result<Composition> {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|x| (x - max).exp()).collect();
    close(&raw)
}

/// Antisymmetric `n x n` array of expected pairwise log-ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CompositionalAverageArray {
    n: usize,
    xi: Vec<f64>,
}

impl CompositionalAverageArray {
    /// Builds the array from its upper triangle; the lower triangle is the negation.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut xi = vec![0.0; n * n];
        for (i, j) in pairs(n) {
            let v = upper(i, j);
            xi[i * n + j] = v;
            xi[j * n + i] = -v;
        }
        Self { n, xi }
    }

    pub fn from_log_ratios(v: &LogRatioVector) -> Self {
        Self::from_upper(v.n, |i, j| v.get(i, j))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.xi[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.xi.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Upper triangle as a log-ratio vector.
    pub fn to_log_ratios(&self) -> LogRatioVector {
        LogRatioVector {
            n: self.n,
            entries: pairs(self.n).map(|(i, j)| self.get(i, j)).collect(),
        }
    }

    pub fn antisymmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            worst = worst.max(self.get(i, i).abs());
            for j in 0..n {
                worst = worst.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Largest violation of `xi_ij = xi_ik + xi_kj`.
    pub fn consistency_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = (self.get(i, j) - self.get(i, k) - self.get(k, j)).abs();
                    worst = worst.max(v);
                }
            }
        }
        worst
    }
}

impl TryFrom<Vec<Vec<f64>>> for CompositionalAverageArray {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let array = Self {
            n,
            xi: rows.concat(),
        };
        let violation = array.antisymmetry_violation();
        if violation > ALGEBRAIC_TOL {
            return Err(Error::InconsistentArray(violation));
        }
        Ok(array)
    }
}

impl From<CompositionalAverageArray> for Vec<Vec<f64>> {
    fn from(a: CompositionalAverageArray) -> Self {
        a.rows()
    }
}

/// Reads the priorities off a consistent average array: `c_i = exp(xi_i0)`, closed.
pub fn array_to_composition(e: &CompositionalAverageArray) -> Result<Composition> {
    let violation = e.antisymmetry_violation().max(e.consistency_violation());
    if violation > CONSISTENCY_TOL {
        return Err(Error::InconsistentArray(violation));
    }
    let first: Vec<f64> = (0..e.n).map(|i| e.get(i, 0)).collect();
    let w = close_exp(&first)?;
    #[cfg(debug_assertions)]
    {
        let last = e.n - 1;
        let other: Vec<f64> = (0..e.n).map(|i| e.get(i, last)).collect();
        let v = close_exp(&other)?;
        debug_assert!(w
            .parts()
            .iter()
            .zip(v.parts())
            .all(|(a, b)| (a - b).abs() < 1e-8));
    }
    Ok(w)
}

/// Reciprocal pairwise comparison matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pcm {
    n: usize,
    m: Vec<f64>,
}

impl Pcm {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPcm("matrix is not square".into()));
        }
        let m = rows.concat();
        if let Some(idx) = m.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidPcm(format!(
                "entry ({}, {}) is not strictly positive",
                idx / n,
                idx % n
            )));
        }
        for i in 0..n {
            if (m[i * n + i] - 1.0).abs() > ALGEBRAIC_TOL {
                return Err(Error::InvalidPcm(format!("diagonal entry {i} is not 1")));
            }
            for j in i + 1..n {
                if (m[i * n + j] * m[j * n + i] - 1.0).abs() > ALGEBRAIC_TOL {
                    return Err(Error::InvalidPcm(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not reciprocal"
                    )));
                }
            }
        }
        Ok(Self { n, m })
    }

    /// The consistent matrix `m_ij = w_i / w_j`.
    pub fn from_composition(w: &Composition) -> Self {
        let n = w.dim();
        let m = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| if i == j { 1.0 } else { w.get(i) / w.get(j) })
            .collect();
        Self { n, m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.n + j]
    }

    /// Column `col` normalized to unit sum; the priorities when the matrix is consistent.
    pub fn column_normalized(&self, col: usize) -> Result<Composition> {
        if col >= self.n {
            return Err(Error::CriterionOutOfRange {
                index: col,
                n: self.n,
            });
        }
        let column: Vec<f64> = (0..self.n).map(|i| self.get(i, col)).collect();
        close(&column)
    }
}

/// Multiplicative transitivity `m_ij = m_ih * m_hj`, relative tolerance `tol`.
pub fn is_fully_consistent(m: &Pcm, tol: f64) -> bool {
    let n = m.n;
    (0..n).all(|i| {
        (0..n).all(|j| {
            (0..n).all(|h| (m.get(i, j) - m.get(i, h) * m.get(h, j)).abs() <= tol * m.get(i, j))
        })
    })
}

#[derive(Serialize, Deserialize)]
struct RawPriorityMatrix {
    labels: Vec<String>,
    rows: Vec<Composition>,
}

/// Priorities of `K` decision-makers over the same `n` criteria, one composition per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPriorityMatrix", into = "RawPriorityMatrix")]
pub struct PriorityMatrix {
    labels: Vec<String>,
    rows: Vec<Composition>,
}

impl TryFrom<RawPriorityMatrix> for PriorityMatrix {
    type Error = Error;

    fn try_from(raw: RawPriorityMatrix) -> Result<Self> {
        Self::new(raw.labels, raw.rows)
    }
}

impl From<PriorityMatrix> for RawPriorityMatrix {
    fn from(w: PriorityMatrix) -> Self {
        Self {
            labels: w.labels,
            rows: w.rows,
        }
    }
}

/// `c1, c2, ..., cn`.
pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("c{i}")).collect()
}

impl PriorityMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Composition>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyMatrix)?;
        let n = first.dim();
        if let Some(bad) = rows.iter().find(|r| r.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        if labels.len() != n {
            return Err(Error::LabelMismatch {
                labels: labels.len(),
                criteria: n,
            });
        }
        Ok(Self { labels, rows })
    }

    /// Rows labelled `c1..cn`.
    pub fn from_rows(rows: Vec<Composition>) -> Result<Self> {
        let n = rows.first().ok_or(Error::EmptyMatrix)?.dim();
        Self::new(default_labels(n), rows)
    }

    /// Closes every raw row, then builds the matrix with default labels.
    pub fn from_raw(raw: &[Vec<f64>]) -> Result<Self> {
        let rows = raw.iter().map(|r| close(r)).collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_criteria() {
            return Err(Error::LabelMismatch {
                labels: labels.len(),
                criteria: self.n_criteria(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Number of decision-makers, `K`.
    pub fn n_dms(&self) -> usize {
        self.rows.len()
    }

    /// Number of criteria, `n`.
    pub fn n_criteria(&self) -> usize {
        self.rows[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Composition] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &Composition {
        &self.rows[k]
    }

    pub fn log_ratio_rows(&self) -> Vec<LogRatioVector> {
        self.rows.iter().map(log_ratio_transform).collect()
    }

    /// `ln(W_ki / W_kj)` for every decision-maker `k`.
    pub fn pair_log_ratios(&self, i: usize, j: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| (r.get(i) / r.get(j)).ln())
            .collect()
    }

    pub(crate) fn check_criterion(&self, index: usize) -> Result<()> {
        let n = self.n_criteria();
        if index >= n {
            return Err(Error::CriterionOutOfRange { index, n });
        }
        Ok(())
    }

    /// Reorders criteria: criterion `k` of the result is criterion `perm[k]` of `self`.
    pub fn permute_criteria(&self, perm: &[usize]) -> Self {
        Self {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
            rows: self.rows.iter().map(|r| r.permute(perm)).collect(),
        }
    }

    /// Subset (or reordering) of decision-makers.
    pub fn select_dms(&self, indices: &[usize]) -> Self {
        Self {
            labels: self.labels.clone(),
            rows: indices.iter().map(|&k| self.rows[k].clone()).collect(),
        }
    }
}

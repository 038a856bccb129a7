//! Pairwise comparison of criteria across a group of decision-makers.
//!
//! All tests work on the per-DM log-ratio `ln(W_ki / W_kj)`: a positive value means
//! the decision-maker rates criterion `i` above `j`. The Bayesian tests report
//! `d`, the posterior probability that `i` is more important than `j`, and the set
//! of these orderings over every pair forms a [`CredalRanking`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::composition::{pairs, PriorityMatrix};
use crate::error::{Error, Result};

/// Signed-rank statistics for one criterion pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedRankSummary {
    pub i: usize,
    pub j: usize,
    /// `ln(W_ki / W_kj)` per decision-maker.
    pub log_ratios: Vec<f64>,
    /// Rank of `|log_ratio|` carrying the sign of the log-ratio; 0 for dropped zeros.
    pub signed_ranks: Vec<f64>,
    pub r_plus: f64,
    pub r_minus: f64,
    /// `min(r_plus, r_minus)`.
    pub t_stat: f64,
    /// Number of zero log-ratios excluded from ranking.
    pub dropped: usize,
}

impl SignedRankSummary {
    /// Number of ranked (non-zero) observations.
    pub fn ranked(&self) -> usize {
        self.log_ratios.len() - self.dropped
    }

    /// Unsigned ranks, `None` for dropped observations.
    pub fn ranks(&self) -> Vec<Option<f64>> {
        self.signed_ranks
            .iter()
            .map(|&r| (r != 0.0).then_some(r.abs()))
            .collect()
    }
}

fn check_pair(w: &PriorityMatrix, i: usize, j: usize) -> Result<()> {
    w.check_criterion(i)?;
    w.check_criterion(j)?;
    if i == j {
        return Err(Error::SameCriterion(i));
    }
    Ok(())
}

/// Ranks `values` by magnitude (1-based), averaging ranks over exact ties.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

pub fn signed_rank_summary(w: &PriorityMatrix, i: usize, j: usize) -> Result<SignedRankSummary> {
    check_pair(w, i, j)?;
    let log_ratios = w.pair_log_ratios(i, j);
    let kept: Vec<usize> = (0..log_ratios.len())
        .filter(|&k| log_ratios[k] != 0.0)
        .collect();
    if kept.is_empty() {
        return Err(Error::AllZeroRatios { i, j });
    }
    let magnitudes: Vec<f64> = kept.iter().map(|&k| log_ratios[k].abs()).collect();
    let ranks = average_ranks(&magnitudes);

    let mut signed_ranks = vec![0.0; log_ratios.len()];
    let (mut r_plus, mut r_minus) = (0.0, 0.0);
    for (&k, &rank) in kept.iter().zip(&ranks) {
        if log_ratios[k] > 0.0 {
            r_plus += rank;
            signed_ranks[k] = rank;
        } else {
            r_minus += rank;
            signed_ranks[k] = -rank;
        }
    }
    Ok(SignedRankSummary {
        i,
        j,
        dropped: log_ratios.len() - kept.len(),
        log_ratios,
        signed_ranks,
        r_plus,
        r_minus,
        t_stat: f64::min(r_plus, r_minus),
    })
}

/// Largest `t` with `P(T <= t) <= alpha / 2` under the signed-rank null for `m`
/// ranked observations (two-sided exact critical value), if any.
pub fn wilcoxon_critical_value(m: usize, alpha: f64) -> Option<usize> {
    let max_sum = m * (m + 1) / 2;
    // counts[s]: number of sign assignments with positive-rank sum s, scaled by 2^-m
    let mut dist = vec![0.0_f64; max_sum + 1];
    dist[0] = 1.0;
    for rank in 1..=m {
        for s in (rank..=max_sum).rev() {
            dist[s] = 0.5 * dist[s] + 0.5 * dist[s - rank];
        }
        for s in dist.iter_mut().take(rank) {
            *s *= 0.5;
        }
    }
    let mut cumulative = 0.0;
    let mut critical = None;
    for (t, p) in dist.iter().enumerate() {
        cumulative += p;
        if cumulative <= alpha / 2.0 {
            critical = Some(t);
        } else {
            break;
        }
    }
    critical
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Greater,
    Less,
    Equal,
}

/// Relation between criteria `i` and `j` with confidence `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredalOrdering {
    pub i: usize,
    pub j: usize,
    pub relation: Relation,
    /// Confidence in `relation`, always at least 0.5.
    pub d: f64,
    /// Posterior probability that `i` is more important than `j`.
    pub prob_i_over_j: f64,
}

impl CredalOrdering {
    pub fn from_probability(i: usize, j: usize, p: f64) -> Self {
        // Equal is a presentation category; the core only decides by d.
        let relation = if p > 0.5 {
            Relation::Greater
        } else {
            Relation::Less
        };
        Self {
            i,
            j,
            relation,
            d: p.max(1.0 - p),
            prob_i_over_j: p,
        }
    }

    /// `(more important, less important)`.
    pub fn winner(&self) -> (usize, usize) {
        match self.relation {
            Relation::Less => (self.j, self.i),
            _ => (self.i, self.j),
        }
    }

    /// Relation with `Equal` substituted when `d` falls inside `[0.5, upper]`.
    pub fn relation_with_equal_region(&self, upper: f64) -> Relation {
        if self.d <= upper {
            Relation::Equal
        } else {
            self.relation
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesOptions {
    pub mc_samples: usize,
    pub seed: u64,
    /// Dirichlet weight of the pseudo-observation at zero.
    pub prior_strength: f64,
}

impl BayesOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            mc_samples: 10_000,
            seed,
            prior_strength: 1.0,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Stream seed for the unordered pair `{i, j}`, keyed on the criterion labels so
/// that `(i, j)`, `(j, i)` and any relabelling of the criteria share one stream.
fn pair_seed(w: &PriorityMatrix, seed: u64, i: usize, j: usize) -> u64 {
    let (a, b) = {
        let (x, y) = (&w.labels()[i], &w.labels()[j]);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    let key = fnv1a(a.as_bytes()) ^ splitmix64(fnv1a(b.as_bytes()));
    splitmix64(seed ^ splitmix64(key))
}

/// Precomputed sign structure of the Walsh averages `(z_a + z_b) / 2`.
struct WalshSigns {
    order: Vec<usize>,
    /// Per sorted position: how many partners make the sum negative / non-positive.
    below: Vec<usize>,
    at_or_below: Vec<usize>,
    signs: Vec<f64>,
}

impl WalshSigns {
    fn new(z: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..z.len()).collect();
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
        let sorted: Vec<f64> = order.iter().map(|&k| z[k]).collect();
        // z_a + z_b is monotone in z_b under rounding, so partition points exist.
        let below = sorted
            .iter()
            .map(|&za| sorted.partition_point(|&zb| za + zb < 0.0))
            .collect();
        let at_or_below = sorted
            .iter()
            .map(|&za| sorted.partition_point(|&zb| za + zb <= 0.0))
            .collect();
        let signs = sorted.iter().map(|&v| sign(v)).collect();
        Self {
            order,
            below,
            at_or_below,
            signs,
        }
    }

    /// Sign of `sum_{a <= b} g_a g_b sign(z_a + z_b)`.
    fn statistic_sign(&self, g: &[f64], prefix: &mut Vec<f64>) -> f64 {
        prefix.clear();
        prefix.push(0.0);
        let mut acc = 0.0;
        for &k in &self.order {
            acc += g[k];
            prefix.push(acc);
        }
        let total = acc;
        let mut full = 0.0;
        let mut diag = 0.0;
        for (pos, &k) in self.order.iter().enumerate() {
            let ga = g[k];
            let negative = prefix[self.below[pos]];
            let positive = total - prefix[self.at_or_below[pos]];
            full += ga * (positive - negative);
            diag += ga * ga * self.signs[pos];
        }
        // sum over a <= b equals (sum over all (a, b) + diagonal) / 2
        sign(full + diag)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Bayesian signed-rank test on the log-ratios of criteria `i` and `j`.
///
/// The log-ratios are augmented with a pseudo-observation at zero and weighted by
/// draws from a Dirichlet posterior; `d` is the share of draws whose weighted Walsh
/// averages are positive on balance (zero-balance draws count one half).
pub fn bayesian_signed_rank(
    w: &PriorityMatrix,
    i: usize,
    j: usize,
    opts: &BayesOptions,
) -> Result<CredalOrdering> {
    check_pair(w, i, j)?;
    if w.n_dms() < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            found: w.n_dms(),
        });
    }
    if opts.mc_samples < 1000 {
        return Err(Error::InvalidOption(
            "at least 1000 Monte Carlo samples are required".into(),
        ));
    }
    if !(opts.prior_strength > 0.0 && opts.prior_strength.is_finite()) {
        return Err(Error::InvalidOption(
            "prior strength must be positive".into(),
        ));
    }
    let mut z = Vec::with_capacity(w.n_dms() + 1);
    z.push(0.0);
    z.extend(w.pair_log_ratios(i, j));
    let walsh = WalshSigns::new(&z);

    let prior =
        Gamma::new(opts.prior_strength, 1.0).map_err(|e| Error::InvalidOption(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(w, opts.seed, i, j));
    let mut g = vec![0.0; z.len()];
    let mut prefix = Vec::with_capacity(z.len() + 1);
    let mut score = 0.0;
    for _ in 0..opts.mc_samples {
        // Unnormalized Dirichlet draw; the sign of the statistic is scale-free.
        g[0] = if opts.prior_strength == 1.0 {
            rng.sample(Exp1)
        } else {
            prior.sample(&mut rng)
        };
        for gk in g.iter_mut().skip(1) {
            *gk = rng.sample(Exp1);
        }
        score += match walsh.statistic_sign(&g, &mut prefix) {
            s if s > 0.0 => 1.0,
            s if s < 0.0 => 0.0,
            _ => 0.5,
        };
    }
    Ok(CredalOrdering::from_probability(
        i,
        j,
        score / opts.mc_samples as f64,
    ))
}

/// Sign test with a beta-binomial conjugate: `d = P(p > 1/2)` under
/// `Beta(prior_a + s, prior_b + f)`, where `s` and `f` count the decision-makers
/// preferring `i` and `j` respectively.
pub fn sign_test(
    w: &PriorityMatrix,
    i: usize,
    j: usize,
    prior_a: f64,
    prior_b: f64,
) -> Result<CredalOrdering> {
    check_pair(w, i, j)?;
    if !(prior_a > 0.0 && prior_b > 0.0 && prior_a.is_finite() && prior_b.is_finite()) {
        return Err(Error::InvalidOption(
            "beta prior parameters must be positive".into(),
        ));
    }
    let s = w.rows().iter().filter(|r| r.get(i) > r.get(j)).count() as f64;
    let f = w.rows().iter().filter(|r| r.get(i) < r.get(j)).count() as f64;
    let (a, b) = (prior_a + s, prior_b + f);
    // P(p > 1/2) = I_{1/2}(b, a). Evaluating the smaller tail and complementing
    // makes mirrored pairs sum to exactly one.
    let p = if a == b {
        0.5
    } else if a > b {
        1.0 - beta_reg(a, b, 0.5)
    } else {
        beta_reg(b, a, 0.5)
    };
    Ok(CredalOrdering::from_probability(i, j, p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RankTest {
    BayesWilcoxon(BayesOptions),
    SignTest { prior_a: f64, prior_b: f64 },
}

impl RankTest {
    pub fn sign_test() -> Self {
        RankTest::SignTest {
            prior_a: 1.0,
            prior_b: 1.0,
        }
    }
}

/// One credal ordering per unordered criterion pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredalRanking {
    pub labels: Vec<String>,
    pub test: RankTest,
    pub orderings: Vec<CredalOrdering>,
}

impl CredalRanking {
    pub fn get(&self, i: usize, j: usize) -> Option<&CredalOrdering> {
        self.orderings
            .iter()
            .find(|o| (o.i, o.j) == (i, j) || (o.i, o.j) == (j, i))
    }

    /// Probability that criterion `i` outranks `j`.
    pub fn prob_over(&self, i: usize, j: usize) -> Option<f64> {
        self.get(i, j).map(|o| {
            if o.i == i {
                o.prob_i_over_j
            } else {
                1.0 - o.prob_i_over_j
            }
        })
    }
}

pub fn credal_ranking(w: &PriorityMatrix, test: &RankTest) -> Result<CredalRanking> {
    let orderings = pairs(w.n_criteria())
        .map(|(i, j)| match test {
            RankTest::BayesWilcoxon(opts) => bayesian_signed_rank(w, i, j, opts),
            RankTest::SignTest { prior_a, prior_b } => sign_test(w, i, j, *prior_a, *prior_b),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CredalRanking {
        labels: w.labels().to_vec(),
        test: test.clone(),
        orderings,
    })
}

use std::fmt::Write;

use groupcoda_core::{
    AggregationMethod, AggregationResult, AverageDeviationArray, ClusterModel, CredalRanking,
};
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::error::Result;

/// Upper edge of the band `[0.5, EQUAL_REGION_UPPER]` in which an ordering is
/// displayed as "about equal" (the lower edge 0.45 of `1 - d` mirrors it).
pub const EQUAL_REGION_UPPER: f64 = 0.55;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateOutput {
    pub labels: Vec<String>,
    pub result: AggregationResult,
    /// Decision-makers whose weight falls below the threshold (robust method only).
    pub deviants: Option<Vec<usize>>,
    pub deviant_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescribeOutput {
    pub arrays: Vec<AverageDeviationArray>,
}

/// One drawn arc of the credal ranking graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub from: String,
    pub to: String,
    pub d: f64,
    pub equal_region: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOutput {
    pub ranking: CredalRanking,
    pub arcs: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterOutput {
    pub labels: Vec<String>,
    pub compositional: ClusterModel,
    pub baseline: Option<ClusterModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReportResult {
    Aggregate(AggregateOutput),
    Describe(DescribeOutput),
    Rank(RankOutput),
    Cluster(ClusterOutput),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub result: ReportResult,
    pub warnings: Vec<String>,
}

impl Report {
    /// False when an iterative method stopped at its iteration cap.
    pub fn converged(&self) -> bool {
        match &self.result {
            ReportResult::Aggregate(a) => a.result.converged,
            ReportResult::Cluster(c) => {
                c.compositional.converged && c.baseline.as_ref().is_none_or(|b| b.converged)
            }
            _ => true,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json().map(|s| s + "\n"),
            OutputFormat::Text => Ok(self.to_text()),
            OutputFormat::Dot => match &self.result {
                ReportResult::Rank(r) => Ok(to_dot(r)),
                _ => Err(crate::error::CliError::InvalidArgument(
                    "dot output is only available for rank".into(),
                )),
            },
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.result {
            ReportResult::Aggregate(a) => aggregate_text(&mut out, a),
            ReportResult::Describe(d) => {
                for (k, array) in d.arrays.iter().enumerate() {
                    if k > 0 {
                        out.push('\n');
                    }
                    ad_text(&mut out, array);
                }
            }
            ReportResult::Rank(r) => {
                for arc in &r.arcs {
                    let op = if arc.equal_region { "~" } else { ">" };
                    let _ = writeln!(out, "{} {op} {}  d = {:.3}", arc.from, arc.to, arc.d);
                }
            }
            ReportResult::Cluster(c) => {
                cluster_text(&mut out, "compositional", &c.labels, &c.compositional);
                if let Some(b) = &c.baseline {
                    out.push('\n');
                    cluster_text(&mut out, "baseline (raw weights)", &c.labels, b);
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn row_text(out: &mut String, name: &str, values: &[f64]) {
    let _ = write!(out, "{name:<8}");
    for v in values {
        let _ = write!(out, "{v:>9.3}");
    }
    out.push('\n');
}

fn header_text(out: &mut String, labels: &[String]) {
    let _ = write!(out, "{:<8}", "");
    for l in labels {
        let _ = write!(out, "{l:>9}");
    }
    out.push('\n');
}

fn aggregate_text(out: &mut String, a: &AggregateOutput) {
    let method = match a.result.method {
        AggregationMethod::Amm => "amm",
        AggregationMethod::Gmm => "gmm",
        AggregationMethod::Awgmm => "awgmm",
    };
    let _ = writeln!(out, "method: {method}");
    header_text(out, &a.labels);
    row_text(out, "weights", a.result.weights.parts());
    if let Some(lambda) = &a.result.lambda {
        let _ = writeln!(
            out,
            "iterations: {} (converged: {})",
            a.result.iterations, a.result.converged
        );
        for (k, l) in lambda.iter().enumerate() {
            let _ = writeln!(out, "lambda[DM{}] = {l:.3}", k + 1);
        }
    }
    if let Some(deviants) = &a.deviants {
        let names: Vec<String> = deviants.iter().map(|k| format!("DM{}", k + 1)).collect();
        let _ = writeln!(
            out,
            "deviants (lambda < {}): {}",
            a.deviant_threshold,
            if names.is_empty() {
                "none".into()
            } else {
                names.join(", ")
            }
        );
    }
}

/// Averages above the diagonal, deviations below.
fn ad_text(out: &mut String, array: &AverageDeviationArray) {
    let _ = writeln!(out, "AD ({})", array.estimator);
    header_text(out, &array.labels);
    for (label, row) in array.labels.iter().zip(&array.values) {
        row_text(out, label, row);
    }
}

fn cluster_text(out: &mut String, title: &str, labels: &[String], m: &ClusterModel) {
    let _ = writeln!(
        out,
        "{title}: metric {:?}, inertia {:.6}, {} iterations",
        m.metric, m.inertia, m.iterations
    );
    let mut head = labels.to_vec();
    head.push("sum".into());
    header_text(out, &head);
    for (c, (centroid, sum)) in m.centroids.iter().zip(&m.centroid_sums).enumerate() {
        let mut row = centroid.clone();
        row.push(*sum);
        row_text(out, &format!("l{}", c + 1), &row);
    }
    let members: Vec<String> = m.assignments.iter().map(|a| (a + 1).to_string()).collect();
    let _ = writeln!(out, "assignments: {}", members.join(" "));
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(r: &RankOutput) -> String {
    let mut out = String::from("digraph credal {\n");
    for label in &r.ranking.labels {
        let _ = writeln!(out, "  {};", quote(label));
    }
    for arc in &r.arcs {
        let style = if arc.equal_region {
            ", style=dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{:.2}\"{style}];",
            quote(&arc.from),
            quote(&arc.to),
            arc.d
        );
    }
    out.push_str("}\n");
    out
}

/// Arcs point from the more to the less important criterion.
pub fn arcs(ranking: &CredalRanking) -> Vec<Arc> {
    ranking
        .orderings
        .iter()
        .map(|o| {
            let (hi, lo) = o.winner();
            Arc {
                from: ranking.labels[hi].clone(),
                to: ranking.labels[lo].clone(),
                d: o.d,
                equal_region: o.d <= EQUAL_REGION_UPPER,
            }
        })
        .collect()
}

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use groupcoda_core::{AggregationMethod, BaselineMetric, CompositionalDistance};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Treatment of zero weights in the input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroPolicy {
    #[default]
    Reject,
    /// Substitute this positive value before closure.
    Replace(f64),
}

impl FromStr for ZeroPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "reject" => Ok(ZeroPolicy::Reject),
            "replace" => Ok(ZeroPolicy::Replace(1e-6)),
            _ => {
                let eps = s
                    .strip_prefix("replace:")
                    .ok_or_else(|| format!("expected reject or replace:<eps>, got {s:?}"))?;
                let eps: f64 = eps
                    .parse()
                    .map_err(|_| format!("invalid replacement value {eps:?}"))?;
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(format!("replacement value must be positive, got {eps}"));
                }
                Ok(ZeroPolicy::Replace(eps))
            }
        }
    }
}

impl fmt::Display for ZeroPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroPolicy::Reject => write!(f, "reject"),
            ZeroPolicy::Replace(eps) => write!(f, "replace:{eps}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
    Dot,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            "dot" => Ok(OutputFormat::Dot),
            _ => Err(format!("unknown format {s:?}; expected json, text or dot")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankTestKind {
    /// Bayesian signed-rank test on log-ratios.
    Bayes,
    /// Beta-binomial sign test.
    Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum CommandConfig {
    Aggregate {
        method: AggregationMethod,
        deviant_threshold: f64,
        max_iter: usize,
        tol: f64,
    },
    Describe,
    Rank {
        test: RankTestKind,
        mc_samples: usize,
        prior_strength: f64,
        prior_a: f64,
        prior_b: f64,
    },
    Cluster {
        clusters: usize,
        distance: CompositionalDistance,
        restarts: usize,
        max_iter: usize,
        with_baseline: bool,
        baseline_metric: BaselineMetric,
    },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Aggregate { .. } => "aggregate",
            CommandConfig::Describe => "describe",
            CommandConfig::Rank { .. } => "rank",
            CommandConfig::Cluster { .. } => "cluster",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            CommandConfig::Rank {
                test: RankTestKind::Bayes,
                ..
            } | CommandConfig::Cluster { .. }
        )
    }

    pub fn aggregate(method: AggregationMethod) -> Self {
        CommandConfig::Aggregate {
            method,
            deviant_threshold: 0.01,
            max_iter: 500,
            tol: 1e-10,
        }
    }

    pub fn rank(test: RankTestKind) -> Self {
        CommandConfig::Rank {
            test,
            mc_samples: 10_000,
            prior_strength: 1.0,
            prior_a: 1.0,
            prior_b: 1.0,
        }
    }

    pub fn cluster(clusters: usize, distance: CompositionalDistance) -> Self {
        CommandConfig::Cluster {
            clusters,
            distance,
            restarts: 10,
            max_iter: 300,
            with_baseline: false,
            baseline_metric: BaselineMetric::Cityblock,
        }
    }
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub zero_policy: ZeroPolicy,
    pub format: OutputFormat,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub command: CommandConfig,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, command: CommandConfig) -> Self {
        Self {
            input: input.into(),
            zero_policy: ZeroPolicy::Reject,
            format: OutputFormat::Json,
            seed: None,
            command,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_format(mut self, format: OutputFormat) -> Self {
        self.format = format;
        self
    }

    pub fn with_zero_policy(mut self, policy: ZeroPolicy) -> Self {
        self.zero_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_stochastic() && self.seed.is_none() {
            return Err(CliError::InvalidArgument(format!(
                "{} needs --seed for reproducible output",
                self.command.name()
            )));
        }
        if self.format == OutputFormat::Dot && !matches!(self.command, CommandConfig::Rank { .. }) {
            return Err(CliError::InvalidArgument(
                "dot output is only available for rank".into(),
            ));
        }
        Ok(())
    }

    /// Seed for stochastic commands; `validate` guarantees it is present.
    pub(crate) fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            CliError::InvalidArgument(format!("{} needs --seed", self.command.name()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_policy_parsing() {
        assert_eq!("reject".parse(), Ok(ZeroPolicy::Reject));
        assert_eq!("replace:0.001".parse(), Ok(ZeroPolicy::Replace(0.001)));
        assert_eq!("replace".parse(), Ok(ZeroPolicy::Replace(1e-6)));
        assert!("replace:0".parse::<ZeroPolicy>().is_err());
        assert!("replace:x".parse::<ZeroPolicy>().is_err());
        assert!("drop".parse::<ZeroPolicy>().is_err());
        assert_eq!(ZeroPolicy::Replace(0.5).to_string(), "replace:0.5");
    }

    #[test]
    fn stochastic_commands_need_a_seed() {
        let rank = RunConfig::new("x.csv", CommandConfig::rank(RankTestKind::Bayes));
        assert!(rank.validate().is_err());
        assert!(rank.clone().with_seed(1).validate().is_ok());
        let sign = RunConfig::new("x.csv", CommandConfig::rank(RankTestKind::Sign));
        assert!(sign.validate().is_ok());
        let cluster = RunConfig::new(
            "x.csv",
            CommandConfig::cluster(2, CompositionalDistance::Aitchison),
        );
        assert!(cluster.validate().is_err());
    }

    #[test]
    fn dot_is_rank_only() {
        let c = RunConfig::new("x.csv", CommandConfig::Describe).with_format(OutputFormat::Dot);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_round_trips() {
        let c = RunConfig::new(
            "a.csv",
            CommandConfig::cluster(3, CompositionalDistance::Madc),
        )
        .with_seed(9)
        .with_zero_policy(ZeroPolicy::Replace(1e-4));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
    }
}

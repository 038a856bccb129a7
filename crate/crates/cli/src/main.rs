use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use groupcoda_cli::{execute, CommandConfig, OutputFormat, RankTestKind, RunConfig, ZeroPolicy};
use groupcoda_core::{AggregationMethod, BaselineMetric, CompositionalDistance};

#[derive(Parser)]
#[command(
    name = "groupcoda",
    version,
    about = "Aggregate, describe, rank and cluster the priorities of a group of decision-makers"
)]
struct Cli {
    /// CSV file: a header of criterion labels, then one row of weights per decision-maker
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// How to treat zero weights: reject, or replace:<eps>
    #[arg(long, global = true, default_value = "reject")]
    zero_policy: ZeroPolicy,

    /// Output format: json, text or dot (rank only)
    #[arg(long, global = true, default_value = "json")]
    format: OutputFormat,

    /// Random seed; required by `rank --test bayes` and `cluster`
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate individual priorities into group priorities
    Aggregate {
        #[arg(long, value_enum, default_value_t = Method::Awgmm)]
        method: Method,
        /// Decision-makers with a robust weight below this are reported as deviants
        #[arg(long, default_value_t = 0.01)]
        deviant_threshold: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Average-deviation arrays for the mean, median and robust estimators
    Describe,
    /// Credal ranking of the criteria
    Rank {
        #[arg(long, value_enum, default_value_t = Test::Bayes)]
        test: Test,
        #[arg(long, default_value_t = 10_000)]
        mc_samples: usize,
        /// Dirichlet weight of the pseudo-observation at zero (bayes)
        #[arg(long, default_value_t = 1.0)]
        prior_strength: f64,
        /// Beta prior parameters (sign)
        #[arg(long, default_value_t = 1.0)]
        prior_a: f64,
        #[arg(long, default_value_t = 1.0)]
        prior_b: f64,
    },
    /// Cluster decision-makers with compositional K-means
    Cluster {
        /// Number of clusters
        #[arg(short = 'o', long, default_value_t = 3)]
        clusters: usize,
        #[arg(long, value_enum, default_value_t = Distance::Aitchison)]
        distance: Distance,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        /// Also run K-means on the raw weights for comparison
        #[arg(long)]
        with_baseline: bool,
        #[arg(long, value_enum, default_value_t = Baseline::Cityblock)]
        baseline_metric: Baseline,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Amm,
    Gmm,
    Awgmm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Test {
    Bayes,
    Sign,
}

#[derive(Clone, Copy, ValueEnum)]
enum Distance {
    Aitchison,
    Madc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Euclidean,
    Cityblock,
}

impl Command {
    fn into_config(self) -> CommandConfig {
        match self {
            Command::Aggregate {
                method,
                deviant_threshold,
                max_iter,
                tol,
            } => CommandConfig::Aggregate {
                method: match method {
                    Method::Amm => AggregationMethod::Amm,
                    Method::Gmm => AggregationMethod::Gmm,
                    Method::Awgmm => AggregationMethod::Awgmm,
                },
                deviant_threshold,
                max_iter,
                tol,
            },
            Command::Describe => CommandConfig::Describe,
            Command::Rank {
                test,
                mc_samples,
                prior_strength,
                prior_a,
                prior_b,
            } => CommandConfig::Rank {
                test: match test {
                    Test::Bayes => RankTestKind::Bayes,
                    Test::Sign => RankTestKind::Sign,
                },
                mc_samples,
                prior_strength,
                prior_a,
                prior_b,
            },
            Command::Cluster {
                clusters,
                distance,
                restarts,
                max_iter,
                with_baseline,
                baseline_metric,
            } => CommandConfig::Cluster {
                clusters,
                distance: match distance {
                    Distance::Aitchison => CompositionalDistance::Aitchison,
                    Distance::Madc => CompositionalDistance::Madc,
                },
                restarts,
                max_iter,
                with_baseline,
                baseline_metric: match baseline_metric {
                    Baseline::Euclidean => BaselineMetric::Euclidean,
                    Baseline::Cityblock => BaselineMetric::Cityblock,
                },
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(input) = cli.input else {
        eprintln!("error: --input <FILE> is required");
        return ExitCode::from(2);
    };
    let config = RunConfig {
        input,
        zero_policy: cli.zero_policy,
        format: cli.format,
        seed: cli.seed,
        command: cli.command.into_config(),
    };
    let (stdout, stderr, code) = execute(&config);
    print!("{stdout}");
    for line in stderr {
        eprintln!("{line}");
    }
    ExitCode::from(code as u8)
}

use groupcoda_core::{
    aggregate_amm, aggregate_awgmm, aggregate_gmm, average_deviation_array, check_pareto,
    credal_ranking, kmeans_compositional, kmeans_standard_baseline, AdEstimator, AggregationMethod,
    AggregationResult, AwgmmOptions, BayesOptions, KMeansOptions, PriorityMatrix, RankTest,
};

use crate::config::{CommandConfig, RankTestKind, RunConfig};
use crate::error::{CliError, Result};
use crate::input::load_priorities;
use crate::report::{
    arcs, AggregateOutput, ClusterOutput, DescribeOutput, RankOutput, Report, ReportResult,
};

/// Validates the config, reads the input and runs the configured command.
pub fn run(config: &RunConfig) -> Result<Report> {
    match config.command {
        CommandConfig::Aggregate { .. } => cmd_aggregate(config),
        CommandConfig::Describe => cmd_describe(config),
        CommandConfig::Rank { .. } => cmd_rank(config),
        CommandConfig::Cluster { .. } => cmd_cluster(config),
    }
}

fn prepare(config: &RunConfig) -> Result<(PriorityMatrix, Vec<String>)> {
    config.validate()?;
    let loaded = load_priorities(&config.input, config.zero_policy)?;
    Ok((loaded.matrix, loaded.warnings))
}

fn report(config: &RunConfig, result: ReportResult, warnings: Vec<String>) -> Report {
    Report {
        command: config.command.name().to_string(),
        config: config.clone(),
        result,
        warnings,
    }
}

fn wrong_command(expected: &str) -> CliError {
    CliError::InvalidArgument(format!("configuration is not for {expected}"))
}

pub fn cmd_aggregate(config: &RunConfig) -> Result<Report> {
    let CommandConfig::Aggregate {
        method,
        deviant_threshold,
        max_iter,
        tol,
    } = config.command
    else {
        return Err(wrong_command("aggregate"));
    };
    let (w, mut warnings) = prepare(config)?;
    let result = match method {
        AggregationMethod::Amm => {
            warnings.push(
                "the arithmetic mean of priority vectors is not a valid average of \
                 compositions and should be avoided; use gmm or awgmm"
                    .into(),
            );
            aggregate_amm(&w)
        }
        AggregationMethod::Gmm => aggregate_gmm(&w),
        AggregationMethod::Awgmm if w.n_dms() == 1 => {
            warnings.push("a single decision-maker gets the whole weight".into());
            AggregationResult {
                method: AggregationMethod::Awgmm,
                lambda: Some(vec![1.0]),
                ..aggregate_gmm(&w)
            }
        }
        AggregationMethod::Awgmm => {
            let opts = AwgmmOptions {
                max_iter,
                tol,
                ..AwgmmOptions::default()
            };
            let r = aggregate_awgmm(&w, &opts)?;
            if !r.converged {
                warnings.push(format!("awgmm did not converge in {max_iter} iterations"));
            }
            r
        }
    };
    for c in check_pareto(&w, &result.weights) {
        if !c.preserved {
            warnings.push(format!(
                "every decision-maker prefers {} to {}, but the group weights do not",
                w.labels()[c.preferred],
                w.labels()[c.other]
            ));
        }
    }
    let deviants = result
        .lambda
        .as_ref()
        .map(|_| result.deviants(deviant_threshold));
    let output = AggregateOutput {
        labels: w.labels().to_vec(),
        result,
        deviants,
        deviant_threshold,
    };
    Ok(report(config, ReportResult::Aggregate(output), warnings))
}

pub fn cmd_describe(config: &RunConfig) -> Result<Report> {
    if config.command != CommandConfig::Describe {
        return Err(wrong_command("describe"));
    }
    let (w, warnings) = prepare(config)?;
    let arrays = [
        AdEstimator::Mean,
        AdEstimator::Median,
        AdEstimator::Awgmm(AwgmmOptions::default()),
    ]
    .iter()
    .map(|est| average_deviation_array(&w, est))
    .collect::<groupcoda_core::Result<Vec<_>>>()?;
    Ok(report(
        config,
        ReportResult::Describe(DescribeOutput { arrays }),
        warnings,
    ))
}

pub fn cmd_rank(config: &RunConfig) -> Result<Report> {
    let CommandConfig::Rank {
        test,
        mc_samples,
        prior_strength,
        prior_a,
        prior_b,
    } = config.command
    else {
        return Err(wrong_command("rank"));
    };
    let (w, mut warnings) = prepare(config)?;
    let test = match test {
        RankTestKind::Bayes => RankTest::BayesWilcoxon(BayesOptions {
            mc_samples,
            seed: config.require_seed()?,
            prior_strength,
        }),
        RankTestKind::Sign => RankTest::SignTest { prior_a, prior_b },
    };
    let n = w.n_criteria();
    for i in 0..n {
        for j in i + 1..n {
            let ties = w.rows().iter().filter(|r| r.get(i) == r.get(j)).count();
            if ties > 0 {
                warnings.push(format!(
                    "{} vs {}: {ties} decision-maker(s) weigh both equally; dropped from ranking",
                    w.labels()[i],
                    w.labels()[j]
                ));
            }
        }
    }
    let ranking = credal_ranking(&w, &test)?;
    let output = RankOutput {
        arcs: arcs(&ranking),
        ranking,
    };
    Ok(report(config, ReportResult::Rank(output), warnings))
}

pub fn cmd_cluster(config: &RunConfig) -> Result<Report> {
    let CommandConfig::Cluster {
        clusters,
        distance,
        restarts,
        max_iter,
        with_baseline,
        baseline_metric,
    } = config.command
    else {
        return Err(wrong_command("cluster"));
    };
    let (w, mut warnings) = prepare(config)?;
    let opts = KMeansOptions {
        seed: config.require_seed()?,
        max_iter,
        restarts,
    };
    let compositional = kmeans_compositional(&w, clusters, distance, &opts)?;
    let baseline = if with_baseline {
        warnings.push(
            "the baseline runs K-means on raw weights, ignoring that they are compositions; \
             its centroids need not sum to 1"
                .into(),
        );
        Some(kmeans_standard_baseline(
            &w,
            clusters,
            baseline_metric,
            &opts,
        )?)
    } else {
        None
    };
    for (name, model) in std::iter::once(("compositional", &compositional))
        .chain(baseline.as_ref().map(|b| ("baseline", b)))
    {
        if model.empty_clusters_resolved > 0 {
            warnings.push(format!(
                "{name}: re-seeded {} emptied cluster(s)",
                model.empty_clusters_resolved
            ));
        }
        if !model.converged {
            warnings.push(format!("{name}: did not converge in {max_iter} iterations"));
        }
    }
    let output = ClusterOutput {
        labels: w.labels().to_vec(),
        compositional,
        baseline,
    };
    Ok(report(config, ReportResult::Cluster(output), warnings))
}

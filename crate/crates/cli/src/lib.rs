//! Command-line front end for compositional analysis of group priorities.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;

pub use commands::{cmd_aggregate, cmd_cluster, cmd_describe, cmd_rank, run};
pub use config::{CommandConfig, OutputFormat, RankTestKind, RunConfig, ZeroPolicy};
pub use error::{CliError, Result};
pub use input::{load_priorities, parse_priorities, Loaded};
pub use report::{Report, ReportResult, EQUAL_REGION_UPPER};

/// Runs `config` and renders its report: `(stdout, stderr lines, exit code)`.
pub fn execute(config: &RunConfig) -> (String, Vec<String>, i32) {
    let outcome = run(config).and_then(|r| {
        let text = r.render(config.format)?;
        Ok((text, r))
    });
    match outcome {
        Ok((text, report)) => {
            let code = if report.converged() { 0 } else { 3 };
            // JSON and text carry the warnings themselves; DOT has no place for them.
            let notes = if config.format == OutputFormat::Dot {
                report
                    .warnings
                    .iter()
                    .map(|w| format!("warning: {w}"))
                    .collect()
            } else {
                Vec::new()
            };
            (text, notes, code)
        }
        Err(e) => (String::new(), vec![format!("error: {e}")], e.exit_code()),
    }
}

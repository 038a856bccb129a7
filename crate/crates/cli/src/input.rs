use std::path::Path;

use groupcoda_core::PriorityMatrix;

use crate::config::ZeroPolicy;
use crate::error::{CliError, Result};

/// Rows whose sum is further than this from 1 are reported when closed.
pub const SUM_WARNING_TOL: f64 = 1e-6;

/// A parsed priority matrix plus the notices raised while reading it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub matrix: PriorityMatrix,
    pub warnings: Vec<String>,
}

pub fn load_priorities(path: &Path, policy: ZeroPolicy) -> Result<Loaded> {
    let text = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_priorities(&text, policy)
}

/// Parses CSV text: a header of criterion labels, then one row per decision-maker.
pub fn parse_priorities(data: &[u8], policy: ZeroPolicy) -> Result<Loaded> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(data);
    let labels: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if labels.len() < 2 || labels.iter().any(String::is_empty) {
        return Err(CliError::ParseError {
            line: 1,
            message: "header must name at least two criteria".into(),
        });
    }

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != labels.len() {
            return Err(CliError::RaggedRow {
                line,
                expected: labels.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(record.len());
        let mut replaced = 0;
        for (c, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| CliError::ParseError {
                line,
                message: format!("column {}: cannot parse {field:?} as a number", c + 1),
            })?;
            if !value.is_finite() {
                return Err(CliError::ParseError {
                    line,
                    message: format!("column {}: {field:?} is not finite", c + 1),
                });
            }
            let value = match policy {
                ZeroPolicy::Replace(eps) if value == 0.0 => {
                    replaced += 1;
                    eps
                }
                _ if value <= 0.0 => {
                    return Err(CliError::NonPositiveEntry {
                        line,
                        column: c + 1,
                        value,
                    })
                }
                _ => value,
            };
            row.push(value);
        }
        if replaced > 0 {
            warnings.push(format!(
                "line {line}: replaced {replaced} zero weight(s) with {policy}"
            ));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > SUM_WARNING_TOL {
            warnings.push(format!("line {line}: weights sum to {total}; closed to 1"));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::EmptyInput);
    }
    let matrix = PriorityMatrix::from_raw(&rows)?.with_labels(labels)?;
    Ok(Loaded { matrix, warnings })
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::ParseError {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

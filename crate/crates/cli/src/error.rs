use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },

    #[error("line {line}, column {column}: weight {value} is not positive")]
    NonPositiveEntry {
        line: u64,
        column: usize,
        value: f64,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("input contains no decision-maker rows")]
    EmptyInput,

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Core(#[from] groupcoda_core::Error),

    #[error("cannot encode report: {0}")]
    Encode(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input or arguments, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use groupcoda_core::Error as E;
        match self {
            CliError::Core(
                E::InvalidOption(_)
                | E::TooManyClusters { .. }
                | E::LabelMismatch { .. }
                | E::DimensionTooSmall(_)
                | E::NonPositiveEntry { .. }
                | E::EmptyMatrix,
            ) => 2,
            CliError::Core(_) | CliError::Encode(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

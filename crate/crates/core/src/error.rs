use thiserror::Error;

/// Errors produced by the fragment statistics pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Syntactically malformed detection or feature document.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A well-formed document whose contents break a data invariant.
    #[error("validation error in image `{image_id}`{}: {message}", instance_suffix(*.instance))]
    Validation {
        image_id: String,
        instance: Option<usize>,
        message: String,
    },

    /// An argument outside the operation's domain (negative scale, k > rows, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is valid but too small or too flat for the statistic.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The operation needs data the input does not carry (e.g. a metric scale).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Design matrix columns are linearly dependent.
    #[error("rank-deficient design matrix; collinear columns: {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn instance_suffix(instance: Option<usize>) -> String {
    instance
        .map(|i| format!(", instance {i}"))
        .unwrap_or_default()
}

impl Error {
    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that stem from bad input documents rather than the environment.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Validation { .. } | Error::Csv(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

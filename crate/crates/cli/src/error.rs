//! Harness-level errors and their process exit codes.

use thiserror::Error;

/// One malformed row in a record file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowProblem {
    /// 1-based line number in the file.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cvqds::Error),

    #[error("invalid input: {0}")]
    Validation(String),

    /// Ingestion is all-or-nothing: every offending row is listed.
    #[error("{}", format_problems(.0))]
    Ingest(Vec<RowProblem>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("json serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_problems(problems: &[RowProblem]) -> String {
    const SHOWN: usize = 20;
    let mut out = format!("record file rejected ({} problem rows)", problems.len());
    for p in problems.iter().take(SHOWN) {
        out.push_str(&format!("\n  line {}: {}", p.line, p.message));
    }
    if problems.len() > SHOWN {
        out.push_str(&format!("\n  ... and {} more", problems.len() - SHOWN));
    }
    out
}

impl CliError {
    /// Process exit code: 3 for a no-security condition (g ≤ 0), 2 for any
    /// validation or input failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(cvqds::Error::NoSecurity(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

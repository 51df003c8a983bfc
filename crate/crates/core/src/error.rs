use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the evaluation, scan and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no-signalling violated: {0}")]
    Signalling(String),

    #[error("line {line}: {message}: {content:?}")]
    Parse {
        line: usize,
        message: String,
        content: String,
    },

    #[error("run log is missing contexts (x,y): {}", format_cells(.0))]
    MissingContexts(Vec<(u8, u8)>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("linear program failed: {0}")]
    Solver(String),
}

fn format_cells(cells: &[(u8, u8)]) -> String {
    cells
        .iter()
        .map(|(x, y)| format!("({x},{y})"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] qcurrent::Error),
    #[error("{0} invariant(s) failed")]
    Invariants(usize),
}

impl CliError {
    /// 0 success, 1 invariant failure, 2 config error, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariants(_) => 1,
            CliError::Config(_) | CliError::Io { .. } | CliError::Output(_) => 2,
            CliError::Numerical(qcurrent::Error::Parameter { .. }) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

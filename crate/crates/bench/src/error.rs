use std::io;
use std::path::PathBuf;

use e2ls_core::instance::ParseError;
use e2ls_core::oracle::OracleError;
use e2ls_core::search::ParamError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{}:{line}: bad record: {message}", path.display())]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    /// 1 for solver-side failures, 2 for usage, parse and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Oracle(_) | CliError::Solver(_) => 1,
            _ => 2,
        }
    }
}

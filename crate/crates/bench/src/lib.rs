//! Experiment harness around `e2ls-core`: instance loading, benchmark
//! families, multi-seed batches, per-run records and aggregate statistics.
//! The `e2ls` binary is a thin command-line layer over this crate.

pub mod error;
pub mod experiment;
pub mod family;
pub mod records;
pub mod stats;
pub mod suite;
pub mod validate;

pub use error::CliError;

use std::fs;
use std::path::Path;

use e2ls_core::instance::parse_any;
use e2ls_core::{Instance, ProblemKind};

/// Reads and parses an instance file. Canonical files carry their kind; the
/// dense format needs `kind`.
pub fn load_instance(path: &Path, kind: Option<ProblemKind>) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_any(&text, kind).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Instance name used in records: the file name without directories.
pub fn instance_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

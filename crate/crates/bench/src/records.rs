//! Line-delimited JSON run records. One line per run, append-only, each line
//! self-describing: it embeds the instance checksum, seed and parameters.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use e2ls_core::search::SearchParams;
use e2ls_core::{Instance, ProblemKind, RunRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// First 16 hex digits of the SHA-256 of the canonical instance text.
pub fn checksum(inst: &Instance) -> String {
    let digest = Sha256::digest(inst.to_canonical().as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLine {
    pub instance: String,
    pub checksum: String,
    pub kind: ProblemKind,
    pub run: usize,
    pub seed: u64,
    pub params: SearchParams,
    pub best_value: u64,
    pub constraint_value: u64,
    pub best_solution: Vec<usize>,
    pub time_to_best_s: f64,
    pub elapsed_s: f64,
    pub iterations: u64,
    pub restarts: u64,
    pub adds_explored: u64,
}

impl RunLine {
    pub fn new(instance: &str, inst: &Instance, run: usize, record: RunRecord) -> Self {
        Self {
            instance: instance.to_string(),
            checksum: checksum(inst),
            kind: inst.kind(),
            run,
            seed: record.seed,
            params: record.params,
            best_value: record.best_value,
            constraint_value: record.constraint_value,
            best_solution: record.best_solution,
            time_to_best_s: record.time_to_best_seconds,
            elapsed_s: record.elapsed_seconds,
            iterations: record.iterations,
            restarts: record.restarts,
            adds_explored: record.adds_explored,
        }
    }

    /// Fields that must not depend on scheduling or machine speed.
    pub fn deterministic_key(&self) -> (String, usize, u64, u64, Vec<usize>, u64, u64) {
        (
            self.instance.clone(),
            self.run,
            self.seed,
            self.best_value,
            self.best_solution.clone(),
            self.iterations,
            self.restarts,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureLine {
    pub instance: String,
    pub run: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Record {
    Run(RunLine),
    Failure(FailureLine),
}

impl Record {
    pub fn instance(&self) -> &str {
        match self {
            Record::Run(r) => &r.instance,
            Record::Failure(f) => &f.instance,
        }
    }

    pub fn as_run(&self) -> Option<&RunLine> {
        match self {
            Record::Run(r) => Some(r),
            Record::Failure(_) => None,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Appends records to a file, creating it and its parent directory if needed.
pub struct RecordWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl RecordWriter {
    pub fn append(path: &Path) -> Result<Self, CliError> {
        let io_err = |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err)?;
        Ok(Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn write(&mut self, record: &Record) -> Result<(), CliError> {
        writeln!(self.out, "{}", record.to_line())
            .and_then(|_| self.out.flush())
            .map_err(|source| self.io_error(source))
    }

    fn io_error(&self, source: io::Error) -> CliError {
        CliError::Io {
            path: self.path.clone(),
            source,
        }
    }
}

pub fn parse_records(text: &str, path: &Path) -> Result<Vec<Record>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Record {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_records(path: &Path) -> Result<Vec<Record>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_records(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use e2ls_core::search::solve;

    fn t1() -> Instance {
        Instance::new(
            ProblemKind::Sukp,
            9,
            vec![10, 6, 4],
            vec![5, 4, 3],
            vec![vec![0, 1], vec![1, 2], vec![0]],
        )
        .unwrap()
    }

    #[test]
    fn checksum_depends_on_content() {
        let a = checksum(&t1());
        assert_eq!(a.len(), 16);
        assert_eq!(a, checksum(&t1()));
        assert_ne!(a, checksum(&t1().with_kind(ProblemKind::Sukp, 8)));
    }

    #[test]
    fn round_trip_and_append() {
        let inst = t1();
        let mut params = SearchParams::defaults_for(&inst).with_seed(3);
        params.max_iterations = Some(20);
        params.tabu_len = 1 << 12;
        let run = Record::Run(RunLine::new("t1", &inst, 0, solve(&inst, &params).unwrap()));
        let fail = Record::Failure(FailureLine {
            instance: "t1".into(),
            run: 1,
            seed: 4,
            error: "boom".into(),
        });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/records.jsonl");
        RecordWriter::append(&path).unwrap().write(&run).unwrap();
        RecordWriter::append(&path).unwrap().write(&fail).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, vec![run, fail]);
    }

    #[test]
    fn bad_line_reports_position() {
        let err = parse_records("\n{\"nope\": 1}\n", Path::new("r.jsonl")).unwrap_err();
        assert!(matches!(err, CliError::Record { line: 2, .. }), "{err}");
    }
}

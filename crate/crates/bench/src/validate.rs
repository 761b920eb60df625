//! Post-hoc checks of run records against the instances they name.

use std::collections::HashMap;
use std::fmt;

use e2ls_core::Instance;

use crate::records::{checksum, Record};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    UnknownInstance,
    ChecksumMismatch { expected: String, found: String },
    KindMismatch,
    BadItem(usize),
    DuplicateItem(usize),
    Infeasible { constraint: u64, capacity: u64 },
    ObjectiveMismatch { recorded: u64, actual: u64 },
    ConstraintMismatch { recorded: u64, actual: u64 },
    Failed(String),
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::UnknownInstance => write!(f, "instance not supplied"),
            Problem::ChecksumMismatch { expected, found } => {
                write!(f, "checksum {found} does not match instance ({expected})")
            }
            Problem::KindMismatch => write!(f, "problem kind differs from instance"),
            Problem::BadItem(j) => write!(f, "item {j} out of range"),
            Problem::DuplicateItem(j) => write!(f, "item {j} listed twice"),
            Problem::Infeasible {
                constraint,
                capacity,
            } => write!(
                f,
                "infeasible: constraint {constraint} > capacity {capacity}"
            ),
            Problem::ObjectiveMismatch { recorded, actual } => {
                write!(
                    f,
                    "recorded value {recorded}, solution evaluates to {actual}"
                )
            }
            Problem::ConstraintMismatch { recorded, actual } => {
                write!(f, "recorded constraint {recorded}, solution uses {actual}")
            }
            Problem::Failed(e) => write!(f, "run failed: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub record: usize,
    pub instance: String,
    pub problem: Problem,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes each run's objective and constraint from scratch.
pub fn check_record(record: &Record, inst: &Instance) -> Vec<Problem> {
    let run = match record {
        Record::Run(r) => r,
        Record::Failure(f) => return vec![Problem::Failed(f.error.clone())],
    };
    let mut problems = Vec::new();
    let expected = checksum(inst);
    if run.checksum != expected {
        problems.push(Problem::ChecksumMismatch {
            expected,
            found: run.checksum.clone(),
        });
    }
    if run.kind != inst.kind() {
        problems.push(Problem::KindMismatch);
    }
    let mut seen = vec![false; inst.m()];
    for &j in &run.best_solution {
        if j >= inst.m() {
            problems.push(Problem::BadItem(j));
        } else if std::mem::replace(&mut seen[j], true) {
            problems.push(Problem::DuplicateItem(j));
        }
    }
    if !problems.is_empty() {
        return problems;
    }
    let constraint = inst.constraint_of(&run.best_solution);
    if constraint > inst.capacity() {
        problems.push(Problem::Infeasible {
            constraint,
            capacity: inst.capacity(),
        });
    }
    let actual = inst.evaluate(&run.best_solution);
    if actual != run.best_value {
        problems.push(Problem::ObjectiveMismatch {
            recorded: run.best_value,
            actual,
        });
    }
    if constraint != run.constraint_value {
        problems.push(Problem::ConstraintMismatch {
            recorded: run.constraint_value,
            actual: constraint,
        });
    }
    problems
}

pub fn validate_records(records: &[Record], instances: &HashMap<String, &Instance>) -> Report {
    let mut report = Report::default();
    for (i, record) in records.iter().enumerate() {
        report.checked += 1;
        let problems = match instances.get(record.instance()) {
            Some(inst) => check_record(record, inst),
            None => vec![Problem::UnknownInstance],
        };
        report
            .violations
            .extend(problems.into_iter().map(|problem| Violation {
                record: i,
                instance: record.instance().to_string(),
                problem,
            }));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::RunLine;
    use e2ls_core::search::{solve, SearchParams};
    use e2ls_core::ProblemKind;

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

    fn good() -> RunLine {
        let inst = t1();
        let mut p = SearchParams::defaults_for(&inst);
        p.tabu_len = 1 << 10;
        p.max_iterations = Some(10);
        RunLine::new("t1", &inst, 0, solve(&inst, &p).unwrap())
    }

    #[test]
    fn clean_record_passes() {
        let inst = t1();
        let map = HashMap::from([("t1".to_string(), &inst)]);
        let report = validate_records(&[Record::Run(good())], &map);
        assert_eq!(report.checked, 1);
        assert!(report.is_clean(), "{:?}", report.violations);
    }

    #[test]
    fn tampered_records_are_caught() {
        let inst = t1();
        let mut r = good();
        r.best_solution = vec![0, 1];
        r.best_value = 16;
        r.constraint_value = 12;
        assert_eq!(
            check_record(&Record::Run(r), &inst),
            vec![Problem::Infeasible {
                constraint: 12,
                capacity: 9
            }]
        );
        let mut r = good();
        r.best_value += 1;
        assert!(matches!(
            check_record(&Record::Run(r), &inst)[..],
            [Problem::ObjectiveMismatch { .. }]
        ));
        let mut r = good();
        r.best_solution = vec![0, 0];
        assert_eq!(
            check_record(&Record::Run(r), &inst),
            vec![Problem::DuplicateItem(0)]
        );
        let r = good();
        let other = t1().with_kind(ProblemKind::Sukp, 10);
        assert!(matches!(
            check_record(&Record::Run(r), &other)[0],
            Problem::ChecksumMismatch { .. }
        ));
        let report = validate_records(&[Record::Run(good())], &HashMap::new());
        assert_eq!(report.violations[0].problem, Problem::UnknownInstance);
    }
}

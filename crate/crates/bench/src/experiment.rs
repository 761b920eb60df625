//! Multi-seed batches. Each job is one (instance, run) pair solved with seed
//! `base_seed + run`; workers pull jobs from a shared counter and send results
//! to the caller's thread, which emits them in job order.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;

use e2ls_core::search::{solve, SearchParams};
use e2ls_core::Instance;

use crate::error::CliError;
use crate::records::{FailureLine, Record, RunLine};

pub const DEFAULT_RUNS: usize = 10;

/// Cutoff presets per benchmark set, in seconds.
pub const PRESETS: [(&str, f64); 6] = [
    ("set-I", 500.0),
    ("set-II", 1000.0),
    ("set-III", 1000.0),
    ("set-A", 600.0),
    ("set-B", 1800.0),
    ("set-C", 1800.0),
];

pub fn preset_cutoff(name: &str) -> Option<f64> {
    PRESETS
        .iter()
        .find(|(p, _)| p.eq_ignore_ascii_case(name))
        .map(|&(_, c)| c)
}

/// Parameter overrides; unset fields keep the per-instance defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub t: Option<usize>,
    pub r_num: Option<usize>,
    pub a_num: Option<usize>,
    pub tabu_len: Option<u64>,
    pub cutoff_seconds: Option<f64>,
    pub max_iterations: Option<u64>,
    pub target: Option<u64>,
}

impl Overrides {
    pub fn params_for(&self, inst: &Instance, seed: u64) -> SearchParams {
        let mut p = SearchParams::defaults_for(inst).with_seed(seed);
        if let Some(t) = self.t {
            p.t = t;
        }
        if let Some(r) = self.r_num {
            p.r_num = r;
        }
        if let Some(a) = self.a_num {
            p.a_num = a;
        }
        if let Some(l) = self.tabu_len {
            p.tabu_len = l;
        }
        if let Some(c) = self.cutoff_seconds {
            p.cutoff_seconds = c;
        }
        p.max_iterations = self.max_iterations;
        p.target = self.target;
        p
    }
}

#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub name: String,
    pub instance: Arc<Instance>,
}

impl NamedInstance {
    pub fn new(name: impl Into<String>, instance: Instance) -> Self {
        Self {
            name: name.into(),
            instance: Arc::new(instance),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub instances: Vec<NamedInstance>,
    pub runs: usize,
    pub base_seed: u64,
    pub overrides: Overrides,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(instances: Vec<NamedInstance>) -> Self {
        Self {
            instances,
            runs: DEFAULT_RUNS,
            base_seed: 1,
            overrides: Overrides::default(),
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.runs == 0 {
            return Err(CliError::Usage("runs must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        if self.instances.is_empty() {
            return Err(CliError::Usage("no instances given".into()));
        }
        if let Some(inst) = self.instances.first() {
            self.overrides
                .params_for(&inst.instance, self.base_seed)
                .validate()?;
        }
        Ok(())
    }

    pub fn job_count(&self) -> usize {
        self.instances.len() * self.runs
    }
}

fn run_job(config: &ExperimentConfig, job: usize) -> Record {
    let named = &config.instances[job / config.runs];
    let run = job % config.runs;
    let seed = config.base_seed.wrapping_add(run as u64);
    let inst = &*named.instance;
    let params = config.overrides.params_for(inst, seed);
    let failure = |error: String| {
        Record::Failure(FailureLine {
            instance: named.name.clone(),
            run,
            seed,
            error,
        })
    };
    match panic::catch_unwind(AssertUnwindSafe(|| solve(inst, &params))) {
        Ok(Ok(record)) => Record::Run(RunLine::new(&named.name, inst, run, record)),
        Ok(Err(e)) => failure(e.to_string()),
        Err(payload) => failure(panic_message(payload.as_ref())),
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("solver panicked: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("solver panicked: {s}")
    } else {
        "solver panicked".into()
    }
}

/// Runs every job and returns records ordered by (instance, run). `emit` sees
/// each record once, in that same order, as soon as its predecessors are done.
pub fn run_experiment<F: FnMut(&Record)>(config: &ExperimentConfig, mut emit: F) -> Vec<Record> {
    let total = config.job_count();
    let next = AtomicUsize::new(0);
    let mut out = Vec::with_capacity(total);
    thread::scope(|scope| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..config.workers.min(total.max(1)) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let job = next.fetch_add(1, Ordering::Relaxed);
                if job >= total {
                    break;
                }
                if tx.send((job, run_job(config, job))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        for (job, record) in rx {
            pending.insert(job, record);
            while let Some(record) = pending.remove(&out.len()) {
                emit(&record);
                out.push(record);
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn config(workers: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(vec![
            NamedInstance::new("a", t1()),
            NamedInstance::new("b", t1().with_kind(ProblemKind::Bmcp, 14)),
        ]);
        c.runs = 4;
        c.workers = workers;
        c.overrides.tabu_len = Some(1 << 12);
        c.overrides.max_iterations = Some(30);
        c.overrides.cutoff_seconds = Some(60.0);
        c
    }

    #[test]
    fn presets() {
        assert_eq!(preset_cutoff("set-I"), Some(500.0));
        assert_eq!(preset_cutoff("SET-b"), Some(1800.0));
        assert_eq!(preset_cutoff("set-D"), None);
    }

    #[test]
    fn jobs_are_ordered_and_seeded() {
        let mut seen = Vec::new();
        let records = run_experiment(&config(3), |r| seen.push(r.clone()));
        assert_eq!(records, seen);
        let runs: Vec<_> = records.iter().map(|r| r.as_run().unwrap()).collect();
        assert_eq!(runs.len(), 8);
        for (i, r) in runs.iter().enumerate() {
            assert_eq!(r.instance, if i < 4 { "a" } else { "b" });
            assert_eq!(r.run, i % 4);
            assert_eq!(r.seed, 1 + (i % 4) as u64);
        }
        assert!(runs[..4].iter().all(|r| r.best_value == 14));
        assert!(runs[4..].iter().all(|r| r.best_value == 12));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let key = |rs: Vec<Record>| -> Vec<_> {
            rs.iter()
                .map(|r| r.as_run().unwrap().deterministic_key())
                .collect()
        };
        assert_eq!(
            key(run_experiment(&config(1), |_| {})),
            key(run_experiment(&config(4), |_| {}))
        );
    }

    #[test]
    fn invalid_params_become_failure_records() {
        let mut c = config(2);
        c.overrides.a_num = Some(0);
        assert!(c.validate().is_err());
        let records = run_experiment(&c, |_| {});
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| matches!(r, Record::Failure(_))));
    }

    #[test]
    fn validation() {
        let mut c = config(1);
        assert!(c.validate().is_ok());
        c.runs = 0;
        assert!(c.validate().is_err());
    }
}

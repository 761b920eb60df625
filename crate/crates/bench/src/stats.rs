//! Per-instance aggregates over run records and pairwise comparison.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::records::RunLine;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub instance: String,
    pub runs: usize,
    pub best: u64,
    pub mean: f64,
    /// Population standard deviation of the run bests.
    pub sd: f64,
    pub mean_time_to_best: f64,
}

/// Groups runs by instance, in order of first appearance.
pub fn aggregate<'a, I: IntoIterator<Item = &'a RunLine>>(runs: I) -> Vec<AggregateRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&RunLine>> = HashMap::new();
    for r in runs {
        groups
            .entry(&r.instance)
            .or_insert_with(|| {
                order.push(&r.instance);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|name| {
            let mut rs = groups.remove(name).unwrap_or_default();
            rs.sort_by_key(|r| r.run);
            row(name, &rs)
        })
        .collect()
}

fn row(name: &str, runs: &[&RunLine]) -> AggregateRow {
    let k = runs.len() as f64;
    let best = runs.iter().map(|r| r.best_value).max().unwrap_or(0);
    let mean = runs.iter().map(|r| r.best_value as f64).sum::<f64>() / k;
    let var = runs
        .iter()
        .map(|r| (r.best_value as f64 - mean).powi(2))
        .sum::<f64>()
        / k;
    AggregateRow {
        instance: name.to_string(),
        runs: runs.len(),
        best,
        mean,
        sd: var.sqrt(),
        mean_time_to_best: runs.iter().map(|r| r.time_to_best_s).sum::<f64>() / k,
    }
}

pub fn render_table(rows: &[AggregateRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.instance.len())
        .max()
        .unwrap_or(0)
        .max("instance".len());
    let mut out = format!(
        "{:<width$}  {:>4}  {:>10}  {:>12}  {:>10}  {:>10}\n",
        "instance", "runs", "best", "mean", "sd", "time_s"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>4}  {:>10}  {:>12.2}  {:>10.2}  {:>10.3}",
            r.instance, r.runs, r.best, r.mean, r.sd, r.mean_time_to_best
        );
    }
    out
}

pub fn render_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("instance,runs,best,mean,sd,mean_time_to_best_s\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.instance, r.runs, r.best, r.mean, r.sd, r.mean_time_to_best
        );
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

impl Tally {
    fn count(&mut self, ord: std::cmp::Ordering) {
        match ord {
            std::cmp::Ordering::Greater => self.wins += 1,
            std::cmp::Ordering::Equal => self.ties += 1,
            std::cmp::Ordering::Less => self.losses += 1,
        }
    }
}

/// Better / equal / worse counts of `ours` against `theirs`, on instances
/// present in both.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Comparison {
    pub best: Tally,
    pub mean: Tally,
    pub only_ours: Vec<String>,
    pub only_theirs: Vec<String>,
}

pub fn compare(ours: &[AggregateRow], theirs: &[AggregateRow]) -> Comparison {
    let index: HashMap<&str, &AggregateRow> =
        theirs.iter().map(|r| (r.instance.as_str(), r)).collect();
    let mut cmp = Comparison::default();
    for a in ours {
        match index.get(a.instance.as_str()) {
            Some(b) => {
                cmp.best.count(a.best.cmp(&b.best));
                cmp.mean.count(a.mean.total_cmp(&b.mean));
            }
            None => cmp.only_ours.push(a.instance.clone()),
        }
    }
    let mine: std::collections::HashSet<&str> = ours.iter().map(|r| r.instance.as_str()).collect();
    cmp.only_theirs = theirs
        .iter()
        .filter(|r| !mine.contains(r.instance.as_str()))
        .map(|r| r.instance.clone())
        .collect();
    cmp
}

pub fn render_comparison(cmp: &Comparison) -> String {
    let mut out = format!(
        "{:<6}  {:>6}  {:>6}  {:>6}\n",
        "metric", "better", "equal", "worse"
    );
    for (name, t) in [("best", cmp.best), ("mean", cmp.mean)] {
        let _ = writeln!(
            out,
            "{name:<6}  {:>6}  {:>6}  {:>6}",
            t.wins, t.ties, t.losses
        );
    }
    if !cmp.only_ours.is_empty() {
        let _ = writeln!(out, "only in first: {}", cmp.only_ours.join(", "));
    }
    if !cmp.only_theirs.is_empty() {
        let _ = writeln!(out, "only in second: {}", cmp.only_theirs.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use e2ls_core::search::SearchParams;
    use e2ls_core::{Instance, ProblemKind};

    fn line(instance: &str, run: usize, best: u64, ttb: f64) -> RunLine {
        let inst = Instance::new(ProblemKind::Sukp, 1, vec![1], vec![1], vec![vec![0]]).unwrap();
        RunLine {
            instance: instance.into(),
            checksum: String::new(),
            kind: ProblemKind::Sukp,
            run,
            seed: run as u64,
            params: SearchParams::defaults_for(&inst),
            best_value: best,
            constraint_value: 0,
            best_solution: vec![],
            time_to_best_s: ttb,
            elapsed_s: 1.0,
            iterations: 0,
            restarts: 0,
            adds_explored: 0,
        }
    }

    #[test]
    fn population_sd() {
        // Bests 2, 4, 4, 4, 5, 5, 7, 9: mean 5, population variance 4.
        let runs: Vec<_> = [2, 4, 4, 4, 5, 5, 7, 9]
            .iter()
            .enumerate()
            .map(|(i, &b)| line("a", i, b, i as f64))
            .collect();
        let rows = aggregate(&runs);
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].best, rows[0].mean, rows[0].sd), (9, 5.0, 2.0));
        assert_eq!(rows[0].mean_time_to_best, 3.5);
    }

    #[test]
    fn constant_runs_have_zero_sd() {
        let runs: Vec<_> = (0..10).map(|i| line("t1", i, 14, 0.0)).collect();
        let r = &aggregate(&runs)[0];
        assert_eq!((r.best, r.mean, r.sd), (14, 14.0, 0.0));
    }

    #[test]
    fn groups_keep_first_appearance_order() {
        let runs = vec![
            line("b", 0, 1, 0.0),
            line("a", 0, 2, 0.0),
            line("b", 1, 3, 0.0),
        ];
        let rows = aggregate(&runs);
        assert_eq!(
            rows.iter().map(|r| r.instance.as_str()).collect::<Vec<_>>(),
            ["b", "a"]
        );
        assert_eq!(rows[0].runs, 2);
    }

    #[test]
    fn comparison_counts() {
        let ours = aggregate(&[
            line("a", 0, 5, 0.0),
            line("b", 0, 5, 0.0),
            line("c", 0, 1, 0.0),
        ]);
        let theirs = aggregate(&[
            line("a", 0, 4, 0.0),
            line("b", 0, 5, 0.0),
            line("d", 0, 1, 0.0),
        ]);
        let cmp = compare(&ours, &theirs);
        assert_eq!(
            cmp.best,
            Tally {
                wins: 1,
                ties: 1,
                losses: 0
            }
        );
        assert_eq!(cmp.only_ours, ["c"]);
        assert_eq!(cmp.only_theirs, ["d"]);
        let selfcmp = compare(&ours, &ours);
        assert_eq!(
            selfcmp.best,
            Tally {
                wins: 0,
                ties: 3,
                losses: 0
            }
        );
        assert_eq!(
            selfcmp.mean,
            Tally {
                wins: 0,
                ties: 3,
                losses: 0
            }
        );
    }
}

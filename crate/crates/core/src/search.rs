//! The E2LS search engine.
//!
//! * [`add_star`] recursively extends a solution: it absorbs cost-free items,
//!   ranks the feasible additions by value-weight ratio and branches on the
//!   best `a_num` of them, recording the best non-tabu solution it meets.
//! * [`local_search`] removes each of the `r_num` worst-ratio items in turn
//!   and runs [`add_star`] on what is left.
//! * [`solve`] alternates local search steps with tabu insertion and restarts
//!   from a fresh randomized greedy solution when a step finds nothing.
//!
//! Both problem kinds share this code; [`SolutionState`] decides which
//! quantity is the objective and which one is constrained.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{default_sampling, random_greedy_into};
use crate::instance::{Instance, ProblemKind};
use crate::solution::{Ratio, SolutionState};
use crate::tabu::{HashWeights, TabuStore, DEFAULT_TABU_LEN};

/// Clock checks inside [`add_star`] happen once per this many recursive entries.
const CLOCK_STRIDE: u64 = 1024;

/// When local search hands a reduced solution to [`add_star`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TabuGate {
    /// After every removal.
    #[default]
    Always,
    /// Only when the reduced solution is itself tabu, as the pseudocode is
    /// printed.
    WhenReducedTabu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Samples per greedy construction step.
    pub t: usize,
    /// Removal candidates per local search step.
    pub r_num: usize,
    /// Addition candidates per recursive addition step.
    pub a_num: usize,
    /// Length of each tabu bit vector.
    pub tabu_len: u64,
    /// Wall-clock budget in seconds.
    pub cutoff_seconds: f64,
    pub seed: u64,
    /// Stop after this many local search steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    /// Stop as soon as the best objective reaches this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u64>,
    #[serde(default)]
    pub tabu_gate: TabuGate,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("sampling count t must be at least 1")]
    Sampling,
    #[error("r_num must be at least 1")]
    RemovalCandidates,
    #[error("a_num must be at least 1")]
    AdditionCandidates,
    #[error("tabu length must be at least 1")]
    TabuLength,
    #[error("cutoff must be a positive number of seconds, got {0}")]
    Cutoff(f64),
}

impl SearchParams {
    /// Defaults for the instance's kind: `r_num = a_num = 2` for SUKP, 5 for
    /// BMCP, `t = ceil(sqrt(max(m, n)))`, tabu length 10^8.
    pub fn defaults_for(inst: &Instance) -> Self {
        let candidates = match inst.kind() {
            ProblemKind::Sukp => 2,
            ProblemKind::Bmcp => 5,
        };
        Self {
            t: default_sampling(inst),
            r_num: candidates,
            a_num: candidates,
            tabu_len: DEFAULT_TABU_LEN,
            cutoff_seconds: 10.0,
            seed: 0,
            max_iterations: None,
            target: None,
            tabu_gate: TabuGate::Always,
        }
    }

    pub fn with_cutoff(mut self, seconds: f64) -> Self {
        self.cutoff_seconds = seconds;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.t == 0 {
            return Err(ParamError::Sampling);
        }
        if self.r_num == 0 {
            return Err(ParamError::RemovalCandidates);
        }
        if self.a_num == 0 {
            return Err(ParamError::AdditionCandidates);
        }
        if self.tabu_len == 0 {
            return Err(ParamError::TabuLength);
        }
        if !(self.cutoff_seconds > 0.0 && self.cutoff_seconds.is_finite()) {
            return Err(ParamError::Cutoff(self.cutoff_seconds));
        }
        Ok(())
    }
}

/// Best solution recorded during a search step. The empty record stands for
/// "nothing found" and compares as objective 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Incumbent {
    pub value: u64,
    pub items: Option<Vec<usize>>,
}

impl Incumbent {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_none()
    }

    /// Records `state` if its objective is strictly better.
    #[inline]
    pub fn offer(&mut self, state: &SolutionState<'_>) -> bool {
        let value = state.objective();
        if value > self.value {
            self.value = value;
            self.items = Some(state.sorted_items());
            true
        } else {
            false
        }
    }

    /// Takes `other` if it is strictly better.
    pub fn merge(&mut self, other: Incumbent) {
        if other.value > self.value {
            *self = other;
        }
    }
}

/// Wall-clock deadline plus a counter of recursive addition entries.
#[derive(Debug)]
pub struct SearchClock {
    start: Instant,
    deadline: Option<Instant>,
    entries: u64,
    expired: bool,
}

impl SearchClock {
    pub fn new(start: Instant, budget: Duration) -> Self {
        Self {
            start,
            deadline: start.checked_add(budget),
            entries: 0,
            expired: false,
        }
    }

    pub fn unlimited() -> Self {
        Self {
            start: Instant::now(),
            deadline: None,
            entries: 0,
            expired: false,
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    /// Recursive addition entries so far.
    pub fn entries(&self) -> u64 {
        self.entries
    }

    /// Reads the clock and reports whether the deadline has passed.
    pub fn check(&mut self) -> bool {
        if !self.expired {
            if let Some(deadline) = self.deadline {
                self.expired = Instant::now() >= deadline;
            }
        }
        self.expired
    }

    pub fn is_expired(&self) -> bool {
        self.expired
    }

    fn enter(&mut self) {
        self.entries += 1;
        if self.entries.is_multiple_of(CLOCK_STRIDE) {
            self.check();
        }
    }
}

/// Descending ratio, ties by ascending index.
fn best_first(a: &(Ratio, usize), b: &(Ratio, usize)) -> Ordering {
    b.0.cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Ascending ratio, ties by ascending index.
fn worst_first(a: &(Ratio, usize), b: &(Ratio, usize)) -> Ordering {
    a.0.cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The first `k` entries of `keys` under `order`, sorted.
fn top_k(
    keys: &mut Vec<(Ratio, usize)>,
    k: usize,
    order: fn(&(Ratio, usize), &(Ratio, usize)) -> Ordering,
) {
    if keys.len() > k {
        keys.select_nth_unstable_by(k - 1, order);
        keys.truncate(k);
    }
    keys.sort_unstable_by(order);
}

struct Frame {
    absorbed: Vec<usize>,
    candidates: Vec<usize>,
    next: usize,
    pending: Option<usize>,
}

/// One recursive entry: absorb cost-free items, collect and rank the
/// feasible candidates.
fn expand(
    state: &mut SolutionState<'_>,
    incumbent: &mut Incumbent,
    a_num: usize,
    tabu: &TabuStore,
    clock: &mut SearchClock,
) -> Frame {
    clock.enter();
    let inst = state.instance();
    let capacity = inst.capacity();
    let mut absorbed = Vec::new();
    let mut feasible = Vec::new();
    for j in 0..inst.m() {
        if state.contains(j) {
            continue;
        }
        let cost = state.cost(j);
        if cost == 0 {
            if !tabu.contains(state.hash_toggled(j)) {
                state.add(j);
                absorbed.push(j);
                incumbent.offer(state);
            }
        } else if state.constraint_value() + cost <= capacity {
            feasible.push((j, cost));
        }
    }
    // Gains are read after absorption; costs of the remaining candidates are
    // unaffected by absorbing cost-free items.
    let mut keys: Vec<(Ratio, usize)> = feasible
        .into_iter()
        .map(|(j, cost)| (Ratio::new(state.gain(j), cost), j))
        .collect();
    if !keys.is_empty() {
        top_k(&mut keys, a_num, best_first);
    }
    Frame {
        absorbed,
        candidates: keys.into_iter().map(|(_, j)| j).collect(),
        next: 0,
        pending: None,
    }
}

/// Recursive addition operator.
///
/// Explores additions to `state`, updating `incumbent` with every non-tabu
/// solution strictly better than it. `state` is restored before returning.
/// With an empty tabu store and `a_num >= m` this enumerates every superset
/// reachable by feasible additions and returns the optimum over supersets of
/// the input.
pub fn add_star(
    state: &mut SolutionState<'_>,
    incumbent: &mut Incumbent,
    a_num: usize,
    tabu: &TabuStore,
    clock: &mut SearchClock,
) {
    // Explicit stack: recursion depth can reach the number of items.
    let mut stack = vec![expand(state, incumbent, a_num, tabu, clock)];
    while let Some(top) = stack.last_mut() {
        if let Some(i) = top.pending.take() {
            state.remove(i);
        }
        let mut child = None;
        if !clock.is_expired() {
            while top.next < top.candidates.len() {
                let i = top.candidates[top.next];
                top.next += 1;
                if !tabu.contains(state.hash_toggled(i)) {
                    child = Some(i);
                    break;
                }
            }
        }
        match child {
            Some(i) => {
                top.pending = Some(i);
                state.add(i);
                incumbent.offer(state);
                let frame = expand(state, incumbent, a_num, tabu, clock);
                stack.push(frame);
            }
            None => {
                let frame = stack.pop().expect("non-empty stack");
                for &j in frame.absorbed.iter().rev() {
                    state.remove(j);
                }
            }
        }
    }
}

/// One local search step from `state`. Returns the best non-tabu solution
/// found over all removal branches, or the empty record. `state` is restored
/// before returning.
pub fn local_search(
    state: &mut SolutionState<'_>,
    r_num: usize,
    a_num: usize,
    tabu: &TabuStore,
    clock: &mut SearchClock,
    gate: TabuGate,
) -> Incumbent {
    let mut best = Incumbent::empty();
    if state.is_empty() {
        return best;
    }
    let mut removals: Vec<(Ratio, usize)> =
        state.items().iter().map(|&j| (state.ratio(j), j)).collect();
    top_k(&mut removals, r_num, worst_first);

    #[cfg(debug_assertions)]
    let before = state.fingerprint();

    for (_, i) in removals {
        state.remove(i);
        if gate == TabuGate::Always || tabu.contains(state.hash()) {
            let mut found = Incumbent::empty();
            add_star(state, &mut found, a_num, tabu, clock);
            best.merge(found);
        }
        state.add(i);
        if clock.check() {
            break;
        }
    }

    #[cfg(debug_assertions)]
    debug_assert!(
        before == state.fingerprint(),
        "local search did not restore its input"
    );

    best
}

/// Optimum over all supersets of the empty solution found by the recursive
/// addition operator with unlimited branching and an empty tabu store.
pub fn exhaustive_add_star(inst: &Instance) -> Incumbent {
    let weights = HashWeights::unshuffled(inst.m(), 1);
    let tabu = TabuStore::new(weights.clone());
    let mut state = SolutionState::with_hashing(inst, weights);
    let mut incumbent = Incumbent::empty();
    add_star(
        &mut state,
        &mut incumbent,
        inst.m(),
        &tabu,
        &mut SearchClock::unlimited(),
    );
    incumbent
}

/// Result of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub best_value: u64,
    /// Sorted item indices of the best solution.
    pub best_solution: Vec<usize>,
    /// Constrained quantity of the best solution.
    pub constraint_value: u64,
    /// Seconds from start until the last improvement.
    pub time_to_best_seconds: f64,
    pub elapsed_seconds: f64,
    /// Local search steps.
    pub iterations: u64,
    /// Greedy reconstructions after an empty local search step.
    pub restarts: u64,
    /// Recursive addition entries.
    pub adds_explored: u64,
    pub seed: u64,
    pub params: SearchParams,
}

/// An improvement of the run's best solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub seconds: f64,
    pub value: u64,
}

pub fn solve(inst: &Instance, params: &SearchParams) -> Result<RunRecord, ParamError> {
    solve_with_trace(inst, params, |_| {})
}

/// Runs the search and reports each improvement of the best solution.
pub fn solve_with_trace(
    inst: &Instance,
    params: &SearchParams,
    mut on_improve: impl FnMut(TracePoint),
) -> Result<RunRecord, ParamError> {
    params.validate()?;
    let start = Instant::now();
    let mut clock = SearchClock::new(start, Duration::from_secs_f64(params.cutoff_seconds));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let weights = HashWeights::build(inst.m(), params.tabu_len, &mut rng);
    let mut tabu = TabuStore::new(weights.clone());
    let mut state = SolutionState::with_hashing(inst, weights);
    random_greedy_into(&mut state, params.t, &mut rng);

    let mut best = Incumbent::empty();
    let mut time_to_best = 0.0;
    let mut iterations = 0u64;
    let mut restarts = 0u64;

    loop {
        if clock.check() {
            break;
        }
        if params.max_iterations.is_some_and(|cap| iterations >= cap) {
            break;
        }
        if params.target.is_some_and(|target| best.value >= target) {
            break;
        }
        let step = local_search(
            &mut state,
            params.r_num,
            params.a_num,
            &tabu,
            &mut clock,
            params.tabu_gate,
        );
        iterations += 1;
        let Some(items) = &step.items else {
            random_greedy_into(&mut state, params.t, &mut rng);
            restarts += 1;
            continue;
        };
        state.set_items(items);
        tabu.insert(state.hash());
        if step.value > best.value {
            time_to_best = clock.elapsed().as_secs_f64();
            on_improve(TracePoint {
                seconds: time_to_best,
                value: step.value,
            });
            best = step;
        }
    }

    let best_solution = best.items.unwrap_or_default();
    Ok(RunRecord {
        best_value: best.value,
        constraint_value: inst.constraint_of(&best_solution),
        best_solution,
        time_to_best_seconds: time_to_best,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        iterations,
        restarts,
        adds_explored: clock.entries(),
        seed: params.seed,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::{t1, t1_bmcp};

    fn empty_tabu(inst: &Instance) -> (TabuStore, SolutionState<'_>) {
        let weights = HashWeights::unshuffled(inst.m(), 1000);
        (
            TabuStore::new(weights.clone()),
            SolutionState::with_hashing(inst, weights),
        )
    }

    #[test]
    fn exhaustive_from_empty_is_optimal_on_t1() {
        let inc = exhaustive_add_star(&t1());
        assert_eq!(inc.value, 14);
        assert_eq!(inc.items, Some(vec![0, 2]));
        let inc = exhaustive_add_star(&t1_bmcp());
        assert_eq!(inc.value, 12);
        assert_eq!(inc.items, Some(vec![1, 2]));
    }

    #[test]
    fn single_candidate_chain_on_t1() {
        let inst = t1();
        let (tabu, mut state) = empty_tabu(&inst);
        let mut inc = Incumbent::empty();
        let mut clock = SearchClock::unlimited();
        add_star(&mut state, &mut inc, 1, &tabu, &mut clock);
        assert_eq!(inc.value, 14);
        assert_eq!(inc.items, Some(vec![0, 2]));
        assert!(state.is_empty());
        // Root entry, then one entry after adding item 0.
        assert_eq!(clock.entries(), 2);
    }

    #[test]
    fn no_feasible_addition_keeps_incumbent() {
        let inst = t1();
        let (tabu, mut state) = empty_tabu(&inst);
        state.add(1);
        let mut inc = Incumbent {
            value: 6,
            items: Some(vec![1]),
        };
        add_star(
            &mut state,
            &mut inc,
            3,
            &tabu,
            &mut SearchClock::unlimited(),
        );
        assert_eq!(inc.items, Some(vec![1]));
        assert_eq!(state.sorted_items(), vec![1]);
    }

    #[test]
    fn local_search_escapes_from_single_item() {
        let inst = t1();
        let (tabu, mut state) = empty_tabu(&inst);
        state.add(1);
        let found = local_search(
            &mut state,
            2,
            2,
            &tabu,
            &mut SearchClock::unlimited(),
            TabuGate::Always,
        );
        assert_eq!(found.value, 14);
        assert_eq!(found.items, Some(vec![0, 2]));
        assert_eq!(state.sorted_items(), vec![1]);
    }

    #[test]
    fn local_search_signals_exhausted_neighbourhood() {
        let inst = t1();
        let (mut tabu, mut state) = empty_tabu(&inst);
        for mask in 0u32..8 {
            let members: Vec<bool> = (0..3).map(|j| mask >> j & 1 == 1).collect();
            tabu.insert_solution(&members);
        }
        state.set_items(&[0, 2]);
        let found = local_search(
            &mut state,
            2,
            2,
            &tabu,
            &mut SearchClock::unlimited(),
            TabuGate::Always,
        );
        assert!(found.is_empty());
    }

    #[test]
    fn local_search_accepts_worse_when_better_is_tabu() {
        let inst = t1();
        let (mut tabu, mut state) = empty_tabu(&inst);
        // From {0} (value 10), the only improving neighbour {0, 2} is tabu.
        tabu.insert_solution(&[true, false, false]);
        tabu.insert_solution(&[true, false, true]);
        state.set_items(&[0]);
        let found = local_search(
            &mut state,
            2,
            2,
            &tabu,
            &mut SearchClock::unlimited(),
            TabuGate::Always,
        );
        assert_eq!(found.items, Some(vec![1]));
        assert_eq!(found.value, 6);
        assert!(found.value < state.objective());
    }

    #[test]
    fn literal_gate_skips_non_tabu_reductions() {
        let inst = t1();
        let (tabu, mut state) = empty_tabu(&inst);
        state.add(1);
        let found = local_search(
            &mut state,
            2,
            2,
            &tabu,
            &mut SearchClock::unlimited(),
            TabuGate::WhenReducedTabu,
        );
        assert!(found.is_empty());
    }

    #[test]
    fn solve_t1_both_kinds() {
        let inst = t1();
        for seed in 0..5 {
            let params = SearchParams::defaults_for(&inst)
                .with_cutoff(0.2)
                .with_seed(seed);
            let rec = solve(&inst, &params).unwrap();
            assert_eq!(rec.best_value, 14);
            assert_eq!(rec.best_solution, vec![0, 2]);
            assert_eq!(rec.constraint_value, 9);
        }
        let bmcp = t1_bmcp();
        let rec = solve(&bmcp, &SearchParams::defaults_for(&bmcp).with_cutoff(0.2)).unwrap();
        assert_eq!(rec.best_value, 12);
        assert_eq!(rec.best_solution, vec![1, 2]);
    }

    #[test]
    fn unconstrained_cases() {
        let inst = t1().with_kind(ProblemKind::Sukp, 12);
        let rec = solve(&inst, &SearchParams::defaults_for(&inst).with_cutoff(0.1)).unwrap();
        assert_eq!(rec.best_value, 20);
        let inst = t1().with_kind(ProblemKind::Bmcp, 20);
        let rec = solve(&inst, &SearchParams::defaults_for(&inst).with_cutoff(0.1)).unwrap();
        assert_eq!(rec.best_value, 12);
    }

    #[test]
    fn iteration_cap_is_deterministic() {
        let inst = crate::instance::generate_uniform(
            &crate::instance::UniformSpec::sukp(60, 60, 0.1, 0.5),
            4,
        )
        .unwrap();
        let mut params = SearchParams::defaults_for(&inst)
            .with_cutoff(60.0)
            .with_seed(3);
        params.max_iterations = Some(300);
        let a = solve(&inst, &params).unwrap();
        let b = solve(&inst, &params).unwrap();
        assert_eq!(a.iterations, 300);
        assert_eq!(
            (
                a.best_value,
                &a.best_solution,
                a.iterations,
                a.restarts,
                a.adds_explored
            ),
            (
                b.best_value,
                &b.best_solution,
                b.iterations,
                b.restarts,
                b.adds_explored
            )
        );
    }

    #[test]
    fn target_stops_early() {
        let inst = t1();
        let mut params = SearchParams::defaults_for(&inst).with_cutoff(30.0);
        params.target = Some(14);
        let rec = solve(&inst, &params).unwrap();
        assert_eq!(rec.best_value, 14);
        assert!(rec.elapsed_seconds < 5.0);
    }

    #[test]
    fn trace_reports_improvements() {
        let inst = t1();
        let mut points = Vec::new();
        let rec = solve_with_trace(
            &inst,
            &SearchParams::defaults_for(&inst).with_cutoff(0.1),
            |p| points.push(p),
        )
        .unwrap();
        assert!(!points.is_empty());
        assert!(points.windows(2).all(|w| w[0].value < w[1].value));
        assert_eq!(points.last().unwrap().value, rec.best_value);
    }

    #[test]
    fn rejects_bad_params() {
        let inst = t1();
        let base = SearchParams::defaults_for(&inst);
        let mut p = base.clone();
        p.r_num = 0;
        assert_eq!(solve(&inst, &p).unwrap_err(), ParamError::RemovalCandidates);
        let p = base.clone().with_cutoff(0.0);
        assert_eq!(solve(&inst, &p).unwrap_err(), ParamError::Cutoff(0.0));
        let mut p = base;
        p.a_num = 0;
        assert_eq!(p.validate(), Err(ParamError::AdditionCandidates));
    }

    #[test]
    fn defaults_depend_on_kind() {
        let p = SearchParams::defaults_for(&t1());
        assert_eq!((p.r_num, p.a_num, p.tabu_len), (2, 2, 100_000_000));
        let p = SearchParams::defaults_for(&t1_bmcp());
        assert_eq!((p.r_num, p.a_num), (5, 5));
    }
}

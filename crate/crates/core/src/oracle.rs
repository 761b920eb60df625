//! Reference solvers for small instances.

use thiserror::Error;

use crate::instance::Instance;
use crate::solution::{Solution, SolutionState};

/// Largest item count [`brute_force`] accepts.
pub const MAX_BRUTE_FORCE_ITEMS: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force needs m <= {max}, instance has m = {m}")]
    TooLarge { m: usize, max: usize },
}

/// Exact optimum by enumerating all `2^m` subsets in Gray-code order, so each
/// step toggles one item. Ties go to the lexicographically smallest sorted
/// item list.
pub fn brute_force(inst: &Instance) -> Result<Solution, OracleError> {
    let m = inst.m();
    if m > MAX_BRUTE_FORCE_ITEMS {
        return Err(OracleError::TooLarge {
            m,
            max: MAX_BRUTE_FORCE_ITEMS,
        });
    }
    let mut state = SolutionState::new(inst);
    let mut best = state.solution();
    for step in 1u64..(1u64 << m) {
        let j = step.trailing_zeros() as usize;
        if state.contains(j) {
            state.remove(j);
        } else {
            state.add(j);
        }
        if !state.is_feasible() {
            continue;
        }
        let value = state.objective();
        if value > best.objective {
            best = state.solution();
        } else if value == best.objective {
            let items = state.sorted_items();
            if items < best.items {
                best = state.solution();
            }
        }
    }
    Ok(best)
}

/// Deterministic best-ratio greedy: absorb cost-free items, then add the
/// feasible item with the largest ratio (lowest index on ties) until nothing
/// fits.
pub fn plain_greedy(inst: &Instance) -> Solution {
    let mut state = SolutionState::new(inst);
    loop {
        for j in 0..inst.m() {
            if !state.contains(j) && state.cost(j) == 0 {
                state.add(j);
            }
        }
        let best = (0..inst.m())
            .filter(|&j| !state.contains(j) && state.can_add(j))
            .map(|j| (state.ratio(j), j))
            .min_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        match best {
            Some((_, j)) => state.add(j),
            None => break,
        }
    }
    state.solution()
}

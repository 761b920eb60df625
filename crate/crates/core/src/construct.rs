//! Randomized greedy construction.
//!
//! Starting from the empty solution, every round first absorbs all items
//! whose addition costs nothing (zero additional weight for SUKP, zero value
//! for BMCP), then samples `t` items with replacement from the feasible
//! candidates and adds the sample with the best value-weight ratio. It stops
//! when no candidate is left, so the result is always feasible and maximal.

use rand::Rng;

use crate::instance::Instance;
use crate::solution::{Ratio, SolutionState};

/// `ceil(sqrt(max(m, n)))`, at least 1.
pub fn default_sampling(inst: &Instance) -> usize {
    let size = inst.m().max(inst.n()) as f64;
    (size.sqrt().ceil() as usize).max(1)
}

pub fn random_greedy<'a, R: Rng + ?Sized>(
    inst: &'a Instance,
    t: usize,
    rng: &mut R,
) -> SolutionState<'a> {
    let mut state = SolutionState::new(inst);
    random_greedy_into(&mut state, t, rng);
    state
}

/// Clears `state` and rebuilds it greedily. The hash tracked by the state
/// (if any) follows along.
pub fn random_greedy_into<R: Rng + ?Sized>(state: &mut SolutionState<'_>, t: usize, rng: &mut R) {
    assert!(t >= 1, "sampling count must be at least 1");
    let inst = state.instance();
    let capacity = inst.capacity();
    state.clear();
    let mut candidates = Vec::new();
    loop {
        candidates.clear();
        for j in 0..inst.m() {
            if state.contains(j) {
                continue;
            }
            let cost = state.cost(j);
            if cost == 0 {
                state.add(j);
            } else if state.constraint_value() + cost <= capacity {
                candidates.push(j);
            }
        }
        if candidates.is_empty() {
            break;
        }
        // The first sample is always accepted; later ones must be strictly better.
        let mut best: Option<(usize, Ratio)> = None;
        for _ in 0..t {
            let j = candidates[rng.gen_range(0..candidates.len())];
            let ratio = state.ratio(j);
            if best.is_none_or(|(_, r)| ratio > r) {
                best = Some((j, ratio));
            }
        }
        let (chosen, _) = best.expect("t >= 1 samples drawn");
        state.add(chosen);
    }
}

/// Whether no non-member can be added without breaking the constraint.
pub fn is_maximal(state: &SolutionState<'_>) -> bool {
    (0..state.instance().m()).all(|j| state.contains(j) || !state.can_add(j))
}

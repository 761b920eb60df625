//! Incrementally maintained item subsets.
//!
//! [`SolutionState`] keeps per-element cover counts so the additional weight
//! of any item, the covered weight `W(S)` and the value `f(S)` are available
//! without rescanning the solution. Both quantities are tracked for both
//! problem kinds; the kind only decides which one is the objective and which
//! one is constrained.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, ProblemKind};
use crate::tabu::{HashWeights, SolutionHash};

/// Exact comparison key `num / den`; a zero denominator is larger than every
/// finite ratio and equal to any other infinite one.
#[derive(Clone, Copy, Debug)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn to_f64(self) -> f64 {
        if self.den == 0 {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.den == 0, other.den == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => {
                (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
            }
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

/// Report form of a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    /// Sorted 0-based item indices.
    pub items: Vec<usize>,
    pub objective: u64,
    /// `W(S)` for SUKP, `f(S)` for BMCP.
    pub constraint: u64,
}

#[derive(Clone, Debug)]
pub struct SolutionState<'a> {
    inst: &'a Instance,
    members: Vec<bool>,
    items: Vec<usize>,
    position: Vec<usize>,
    cover_count: Vec<u32>,
    covered_weight: u64,
    total_value: u64,
    hasher: Option<HashWeights>,
    hash: SolutionHash,
}

impl<'a> SolutionState<'a> {
    /// Empty solution.
    pub fn new(inst: &'a Instance) -> Self {
        Self {
            inst,
            members: vec![false; inst.m()],
            items: Vec::new(),
            position: vec![usize::MAX; inst.m()],
            cover_count: vec![0; inst.n()],
            covered_weight: 0,
            total_value: 0,
            hasher: None,
            hash: SolutionHash::default(),
        }
    }

    /// Empty solution that also tracks its tabu hash under `weights`.
    pub fn with_hashing(inst: &'a Instance, weights: HashWeights) -> Self {
        assert_eq!(
            weights.m(),
            inst.m(),
            "hash weights sized for another instance"
        );
        Self {
            hasher: Some(weights),
            ..Self::new(inst)
        }
    }

    pub fn from_items(inst: &'a Instance, items: &[usize]) -> Self {
        let mut state = Self::new(inst);
        for &j in items {
            state.add(j);
        }
        state
    }

    #[inline]
    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    #[inline]
    pub fn contains(&self, item: usize) -> bool {
        self.members[item]
    }

    /// Membership vector `y`.
    #[inline]
    pub fn members(&self) -> &[bool] {
        &self.members
    }

    /// Selected items in insertion order (not necessarily sorted).
    #[inline]
    pub fn items(&self) -> &[usize] {
        &self.items
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    #[inline]
    pub fn cover_count(&self, element: usize) -> u32 {
        self.cover_count[element]
    }

    /// `W(S)`.
    #[inline]
    pub fn covered_weight(&self) -> u64 {
        self.covered_weight
    }

    /// `f(S)`.
    #[inline]
    pub fn total_value(&self) -> u64 {
        self.total_value
    }

    /// For a non-member, the covered weight gained by adding it; for a
    /// member, the covered weight lost by removing it.
    #[inline]
    pub fn additional_weight(&self, item: usize) -> u64 {
        let exclusive = if self.members[item] { 1 } else { 0 };
        let w = self.inst.weights();
        self.inst
            .covered(item)
            .iter()
            .filter(|&&k| self.cover_count[k] == exclusive)
            .map(|&k| w[k])
            .sum()
    }

    /// Change of the constrained quantity when toggling `item`.
    #[inline]
    pub fn cost(&self, item: usize) -> u64 {
        match self.inst.kind() {
            ProblemKind::Sukp => self.additional_weight(item),
            ProblemKind::Bmcp => self.inst.value(item),
        }
    }

    /// Change of the objective when toggling `item`.
    #[inline]
    pub fn gain(&self, item: usize) -> u64 {
        match self.inst.kind() {
            ProblemKind::Sukp => self.inst.value(item),
            ProblemKind::Bmcp => self.additional_weight(item),
        }
    }

    /// Value-weight ratio: `v / AW` for SUKP, `AW / v` for BMCP. Larger is
    /// better in both cases.
    #[inline]
    pub fn ratio(&self, item: usize) -> Ratio {
        let (gain, cost) = self.gain_cost(item);
        Ratio::new(gain, cost)
    }

    /// `(gain, cost)` from a single coverage scan.
    #[inline]
    pub fn gain_cost(&self, item: usize) -> (u64, u64) {
        let aw = self.additional_weight(item);
        let v = self.inst.value(item);
        match self.inst.kind() {
            ProblemKind::Sukp => (v, aw),
            ProblemKind::Bmcp => (aw, v),
        }
    }

    #[inline]
    pub fn objective(&self) -> u64 {
        match self.inst.kind() {
            ProblemKind::Sukp => self.total_value,
            ProblemKind::Bmcp => self.covered_weight,
        }
    }

    #[inline]
    pub fn constraint_value(&self) -> u64 {
        match self.inst.kind() {
            ProblemKind::Sukp => self.covered_weight,
            ProblemKind::Bmcp => self.total_value,
        }
    }

    #[inline]
    pub fn is_feasible(&self) -> bool {
        self.constraint_value() <= self.inst.capacity()
    }

    /// Whether adding the non-member `item` keeps the solution feasible.
    #[inline]
    pub fn can_add(&self, item: usize) -> bool {
        debug_assert!(!self.members[item]);
        self.constraint_value() + self.cost(item) <= self.inst.capacity()
    }

    pub fn add(&mut self, item: usize) {
        assert!(!self.members[item], "item {item} already selected");
        let w = self.inst.weights();
        for &k in self.inst.covered(item) {
            if self.cover_count[k] == 0 {
                self.covered_weight += w[k];
            }
            self.cover_count[k] += 1;
        }
        self.total_value += self.inst.value(item);
        self.members[item] = true;
        self.position[item] = self.items.len();
        self.items.push(item);
        if let Some(hasher) = &self.hasher {
            self.hash = hasher.toggle(self.hash, item, true);
        }
    }

    pub fn remove(&mut self, item: usize) {
        assert!(self.members[item], "item {item} not selected");
        let w = self.inst.weights();
        for &k in self.inst.covered(item) {
            self.cover_count[k] -= 1;
            if self.cover_count[k] == 0 {
                self.covered_weight -= w[k];
            }
        }
        self.total_value -= self.inst.value(item);
        self.members[item] = false;
        let pos = self.position[item];
        self.items.swap_remove(pos);
        if let Some(&moved) = self.items.get(pos) {
            self.position[moved] = pos;
        }
        self.position[item] = usize::MAX;
        if let Some(hasher) = &self.hasher {
            self.hash = hasher.toggle(self.hash, item, false);
        }
    }

    /// Removes every item.
    pub fn clear(&mut self) {
        while let Some(&j) = self.items.last() {
            self.remove(j);
        }
    }

    /// Moves to the solution holding exactly `items`, touching only the
    /// symmetric difference.
    pub fn set_items(&mut self, items: &[usize]) {
        let mut target = vec![false; self.inst.m()];
        for &j in items {
            target[j] = true;
        }
        let stale: Vec<usize> = self.items.iter().copied().filter(|&j| !target[j]).collect();
        for j in stale {
            self.remove(j);
        }
        for &j in items {
            if !self.members[j] {
                self.add(j);
            }
        }
    }

    /// Current tabu hash.
    ///
    /// # Panics
    /// If the state was built without hash weights.
    #[inline]
    pub fn hash(&self) -> SolutionHash {
        assert!(self.hasher.is_some(), "state does not track a tabu hash");
        self.hash
    }

    /// Hash of the solution with `item` toggled, without changing the state.
    #[inline]
    pub fn hash_toggled(&self, item: usize) -> SolutionHash {
        let hasher = self
            .hasher
            .as_ref()
            .expect("state does not track a tabu hash");
        hasher.toggle(self.hash, item, !self.members[item])
    }

    pub fn sorted_items(&self) -> Vec<usize> {
        let mut items = self.items.clone();
        items.sort_unstable();
        items
    }

    pub fn solution(&self) -> Solution {
        Solution {
            items: self.sorted_items(),
            objective: self.objective(),
            constraint: self.constraint_value(),
        }
    }

    /// Cover counts, cached totals and hash, for restoration checks.
    pub(crate) fn fingerprint(&self) -> (Vec<u32>, u64, u64, SolutionHash, Vec<bool>) {
        (
            self.cover_count.clone(),
            self.covered_weight,
            self.total_value,
            self.hash,
            self.members.clone(),
        )
    }
}

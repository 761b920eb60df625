//! Problem instances shared by both problem kinds.
//!
//! An instance is a bipartite relation between `m` items (each with a value)
//! and `n` elements (each with a weight) plus a single capacity `C`. For the
//! set-union knapsack problem (SUKP) the value of the selected items is
//! maximized while the weight of the union of their elements stays within `C`;
//! for budgeted maximum coverage (BMCP) the roles are swapped: covered weight
//! is maximized while the total item value (cost) stays within `C`.

mod format;
mod generate;

pub use format::{parse_any, parse_dense, parse_instance, ParseError};
pub use generate::{
    generate_grouped, generate_grouped_labeled, generate_uniform, CapacitySpec, GenerateError,
    GroupLabels, GroupedSpec, UniformSpec, DEFAULT_GROUPS,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemKind {
    Sukp,
    Bmcp,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Sukp => "SUKP",
            ProblemKind::Bmcp => "BMCP",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown problem kind `{0}` (expected SUKP or BMCP)")]
pub struct UnknownKind(pub String);

impl FromStr for ProblemKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SUKP" => Ok(ProblemKind::Sukp),
            "BMCP" => Ok(ProblemKind::Bmcp),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one item and one element (m = {m}, n = {n})")]
    Empty { m: usize, n: usize },
    #[error("coverage has {found} rows but there are {m} items")]
    RowCount { m: usize, found: usize },
    #[error("item {item} covers element {index}, out of range for n = {n}")]
    IndexOutOfRange { item: usize, index: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    kind: ProblemKind,
    capacity: u64,
    values: Vec<u64>,
    weights: Vec<u64>,
    coverage: Vec<Vec<usize>>,
    rows: Vec<BitSet>,
}

impl Instance {
    /// Validates and normalizes the raw data. Coverage rows are sorted and
    /// deduplicated.
    pub fn new(
        kind: ProblemKind,
        capacity: u64,
        values: Vec<u64>,
        weights: Vec<u64>,
        mut coverage: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        let (m, n) = (values.len(), weights.len());
        if m == 0 || n == 0 {
            return Err(InstanceError::Empty { m, n });
        }
        if coverage.len() != m {
            return Err(InstanceError::RowCount {
                m,
                found: coverage.len(),
            });
        }
        for (item, row) in coverage.iter_mut().enumerate() {
            if let Some(&index) = row.iter().find(|&&k| k >= n) {
                return Err(InstanceError::IndexOutOfRange { item, index, n });
            }
            row.sort_unstable();
            row.dedup();
        }
        let rows = coverage
            .iter()
            .map(|row| BitSet::from_indices(n, row.iter().copied()))
            .collect();
        Ok(Self {
            kind,
            capacity,
            values,
            weights,
            coverage,
            rows,
        })
    }

    #[inline]
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// Number of items.
    #[inline]
    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Number of elements.
    #[inline]
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    #[inline]
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    #[inline]
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    #[inline]
    pub fn value(&self, item: usize) -> u64 {
        self.values[item]
    }

    #[inline]
    pub fn weight(&self, element: usize) -> u64 {
        self.weights[element]
    }

    /// Sorted element indices covered by `item`.
    #[inline]
    pub fn covered(&self, item: usize) -> &[usize] {
        &self.coverage[item]
    }

    pub fn coverage(&self) -> &[Vec<usize>] {
        &self.coverage
    }

    /// Bit-packed relation row of `item`, width `n`.
    pub fn row(&self, item: usize) -> &BitSet {
        &self.rows[item]
    }

    /// Same relation data solved as the other problem kind, with a new capacity.
    pub fn with_kind(&self, kind: ProblemKind, capacity: u64) -> Self {
        Self {
            kind,
            capacity,
            ..self.clone()
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn total_value(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Weight of the union of elements covered by `items`.
    pub fn union_weight(&self, items: &[usize]) -> u64 {
        let mut seen = BitSet::new(self.n());
        let mut total = 0;
        for &j in items {
            for &k in self.covered(j) {
                if seen.insert(k) {
                    total += self.weights[k];
                }
            }
        }
        total
    }

    pub fn value_sum(&self, items: &[usize]) -> u64 {
        items.iter().map(|&j| self.values[j]).sum()
    }

    /// Objective of an arbitrary item subset: `f` for SUKP, `W` for BMCP.
    pub fn evaluate(&self, items: &[usize]) -> u64 {
        match self.kind {
            ProblemKind::Sukp => self.value_sum(items),
            ProblemKind::Bmcp => self.union_weight(items),
        }
    }

    /// Constrained quantity of an arbitrary item subset: `W` for SUKP, `f` for BMCP.
    pub fn constraint_of(&self, items: &[usize]) -> u64 {
        match self.kind {
            ProblemKind::Sukp => self.union_weight(items),
            ProblemKind::Bmcp => self.value_sum(items),
        }
    }

    pub fn is_feasible(&self, items: &[usize]) -> bool {
        self.constraint_of(items) <= self.capacity
    }

    pub fn stats(&self) -> InstanceStats {
        compute_stats(self)
    }

    /// Canonical text form, see [`parse_instance`].
    pub fn to_canonical(&self) -> String {
        format::to_canonical(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    /// Fraction of ones in the relation matrix.
    pub alpha: f64,
    /// Capacity over total element weight; SUKP only.
    pub beta: Option<f64>,
    pub total_weight: u64,
    pub total_value: u64,
}

pub fn compute_stats(inst: &Instance) -> InstanceStats {
    let ones: usize = inst.coverage.iter().map(Vec::len).sum();
    let total_weight = inst.total_weight();
    let beta = match inst.kind {
        ProblemKind::Sukp if total_weight > 0 => Some(inst.capacity as f64 / total_weight as f64),
        ProblemKind::Sukp => None,
        ProblemKind::Bmcp => None,
    };
    InstanceStats {
        alpha: ones as f64 / (inst.m() * inst.n()) as f64,
        beta,
        total_weight,
        total_value: inst.total_value(),
    }
}

//! Random benchmark families.
//!
//! Uniform instances set every relation entry independently with probability
//! `alpha`. Grouped instances first partition items and elements into groups
//! and only connect items to elements of their own group, with in-group
//! density `rho`. Both repair empty rows and columns afterwards so every item
//! covers something and every element is covered by someone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Instance, ProblemKind};

/// Group count used when none is given.
pub const DEFAULT_GROUPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapacitySpec {
    /// Fraction of the total constrained quantity: `C = floor(ratio * sum w)`
    /// for SUKP, `C = floor(ratio * sum v)` for BMCP.
    Ratio(f64),
    Absolute(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformSpec {
    pub kind: ProblemKind,
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub capacity: CapacitySpec,
    pub value_range: (u64, u64),
    pub weight_range: (u64, u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupedSpec {
    pub kind: ProblemKind,
    pub m: usize,
    pub n: usize,
    pub groups: usize,
    pub rho: f64,
    pub capacity: CapacitySpec,
    pub value_range: (u64, u64),
    pub weight_range: (u64, u64),
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("m and n must be at least 1 (m = {m}, n = {n})")]
    Empty { m: usize, n: usize },
    #[error("invalid {what} range [{lo}, {hi}]: need 1 <= lo <= hi")]
    InvalidRange {
        what: &'static str,
        lo: u64,
        hi: u64,
    },
    #[error("density {0} outside (0, 1]")]
    Density(f64),
    #[error("capacity ratio {0} outside (0, 1]")]
    CapacityRatio(f64),
    #[error("group count {groups} outside [1, {max}]")]
    Groups { groups: usize, max: usize },
}

impl UniformSpec {
    /// SUKP family with values and weights in `[1, 100]`.
    pub fn sukp(m: usize, n: usize, alpha: f64, beta: f64) -> Self {
        Self {
            kind: ProblemKind::Sukp,
            m,
            n,
            alpha,
            capacity: CapacitySpec::Ratio(beta),
            value_range: (1, 100),
            weight_range: (1, 100),
        }
    }

    /// BMCP family with values and weights in `[1, 100]`.
    pub fn bmcp(m: usize, n: usize, alpha: f64, budget: u64) -> Self {
        Self {
            kind: ProblemKind::Bmcp,
            m,
            n,
            alpha,
            capacity: CapacitySpec::Absolute(budget),
            value_range: (1, 100),
            weight_range: (1, 100),
        }
    }

    pub fn name(&self, inst: &Instance) -> String {
        instance_name(self.kind, self.m, self.n, self.alpha, self.capacity, inst)
    }
}

impl GroupedSpec {
    pub fn name(&self, inst: &Instance) -> String {
        instance_name(self.kind, self.m, self.n, self.rho, self.capacity, inst)
    }
}

/// `sukp_<m>_<n>_<alpha>_<beta>` or `bmcp_<m>_<n>_<density>_<C>`.
fn instance_name(
    kind: ProblemKind,
    m: usize,
    n: usize,
    density: f64,
    capacity: CapacitySpec,
    inst: &Instance,
) -> String {
    match (kind, capacity) {
        (ProblemKind::Sukp, CapacitySpec::Ratio(beta)) => {
            format!("sukp_{m}_{n}_{density:.2}_{beta:.2}")
        }
        (ProblemKind::Sukp, CapacitySpec::Absolute(c)) => format!("sukp_{m}_{n}_{density:.2}_{c}"),
        (ProblemKind::Bmcp, _) => format!("bmcp_{m}_{n}_{density}_{}", inst.capacity()),
    }
}

fn check_common(
    m: usize,
    n: usize,
    density: f64,
    capacity: CapacitySpec,
    value_range: (u64, u64),
    weight_range: (u64, u64),
) -> Result<(), GenerateError> {
    if m == 0 || n == 0 {
        return Err(GenerateError::Empty { m, n });
    }
    for (what, (lo, hi)) in [("value", value_range), ("weight", weight_range)] {
        if lo < 1 || lo > hi {
            return Err(GenerateError::InvalidRange { what, lo, hi });
        }
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenerateError::Density(density));
    }
    if let CapacitySpec::Ratio(r) = capacity {
        if !(r > 0.0 && r <= 1.0) {
            return Err(GenerateError::CapacityRatio(r));
        }
    }
    Ok(())
}

pub fn generate_uniform(spec: &UniformSpec, seed: u64) -> Result<Instance, GenerateError> {
    check_common(
        spec.m,
        spec.n,
        spec.alpha,
        spec.capacity,
        spec.value_range,
        spec.weight_range,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (values, weights) = draw_values_weights(
        &mut rng,
        spec.m,
        spec.n,
        spec.value_range,
        spec.weight_range,
    );
    let item_group = vec![0; spec.m];
    let element_group = vec![0; spec.n];
    let coverage = draw_relation(&mut rng, &item_group, &element_group, 1, spec.alpha);
    Ok(finish(spec.kind, spec.capacity, values, weights, coverage))
}

pub fn generate_grouped(spec: &GroupedSpec, seed: u64) -> Result<Instance, GenerateError> {
    generate_grouped_labeled(spec, seed).map(|(inst, _)| inst)
}

/// Group membership of every item and element of a grouped instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLabels {
    pub items: Vec<usize>,
    pub elements: Vec<usize>,
}

impl GroupLabels {
    /// Whether every relation entry connects an item to an element of its own group.
    pub fn respects(&self, inst: &Instance) -> bool {
        self.items.len() == inst.m()
            && self.elements.len() == inst.n()
            && (0..inst.m()).all(|j| {
                inst.covered(j)
                    .iter()
                    .all(|&k| self.items[j] == self.elements[k])
            })
    }
}

/// Like [`generate_grouped`], also returning the drawn partition.
pub fn generate_grouped_labeled(
    spec: &GroupedSpec,
    seed: u64,
) -> Result<(Instance, GroupLabels), GenerateError> {
    check_common(
        spec.m,
        spec.n,
        spec.rho,
        spec.capacity,
        spec.value_range,
        spec.weight_range,
    )?;
    let max = spec.m.min(spec.n);
    if spec.groups < 1 || spec.groups > max {
        return Err(GenerateError::Groups {
            groups: spec.groups,
            max,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (values, weights) = draw_values_weights(
        &mut rng,
        spec.m,
        spec.n,
        spec.value_range,
        spec.weight_range,
    );
    // A single group draws no partition, so it reproduces the uniform stream.
    let (item_group, element_group) = if spec.groups == 1 {
        (vec![0; spec.m], vec![0; spec.n])
    } else {
        (
            random_partition(&mut rng, spec.m, spec.groups),
            random_partition(&mut rng, spec.n, spec.groups),
        )
    };
    let coverage = draw_relation(&mut rng, &item_group, &element_group, spec.groups, spec.rho);
    let inst = finish(spec.kind, spec.capacity, values, weights, coverage);
    Ok((
        inst,
        GroupLabels {
            items: item_group,
            elements: element_group,
        },
    ))
}

fn draw_values_weights(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    (vlo, vhi): (u64, u64),
    (wlo, whi): (u64, u64),
) -> (Vec<u64>, Vec<u64>) {
    let values = (0..m).map(|_| rng.gen_range(vlo..=vhi)).collect();
    let weights = (0..n).map(|_| rng.gen_range(wlo..=whi)).collect();
    (values, weights)
}

/// Balanced random assignment of `count` indices to `groups` non-empty groups.
fn random_partition(rng: &mut ChaCha8Rng, count: usize, groups: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(rng);
    let mut group = vec![0; count];
    for (slot, &idx) in order.iter().enumerate() {
        group[idx] = slot % groups;
    }
    group
}

fn draw_relation(
    rng: &mut ChaCha8Rng,
    item_group: &[usize],
    element_group: &[usize],
    groups: usize,
    density: f64,
) -> Vec<Vec<usize>> {
    let (m, n) = (item_group.len(), element_group.len());
    let mut coverage: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (j, row) in coverage.iter_mut().enumerate() {
        for (k, &g) in element_group.iter().enumerate() {
            if item_group[j] == g && rng.gen_bool(density) {
                row.push(k);
            }
        }
    }

    let mut items_of = vec![Vec::new(); groups];
    for (j, &g) in item_group.iter().enumerate() {
        items_of[g].push(j);
    }
    let mut elements_of = vec![Vec::new(); groups];
    for (k, &g) in element_group.iter().enumerate() {
        elements_of[g].push(k);
    }

    for (j, row) in coverage.iter_mut().enumerate() {
        if row.is_empty() {
            let pool = &elements_of[item_group[j]];
            row.push(pool[rng.gen_range(0..pool.len())]);
        }
    }
    let mut covered = vec![false; n];
    for &k in coverage.iter().flatten() {
        covered[k] = true;
    }
    for k in 0..n {
        if !covered[k] {
            let pool = &items_of[element_group[k]];
            coverage[pool[rng.gen_range(0..pool.len())]].push(k);
        }
    }
    coverage
}

fn finish(
    kind: ProblemKind,
    capacity: CapacitySpec,
    values: Vec<u64>,
    weights: Vec<u64>,
    coverage: Vec<Vec<usize>>,
) -> Instance {
    let capacity = match capacity {
        CapacitySpec::Absolute(c) => c,
        CapacitySpec::Ratio(r) => {
            let total: u64 = match kind {
                ProblemKind::Sukp => weights.iter().sum(),
                ProblemKind::Bmcp => values.iter().sum(),
            };
            (r * total as f64).floor() as u64
        }
    };
    Instance::new(kind, capacity, values, weights, coverage)
        .expect("generated coverage indices are in range")
}

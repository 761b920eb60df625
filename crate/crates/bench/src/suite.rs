//! The desk-scale verification suite: small random instances that brute
//! force solves in milliseconds.

use e2ls_core::instance::{generate_uniform, CapacitySpec, UniformSpec};
use e2ls_core::{Instance, ProblemKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PER_KIND: usize = 200;
pub const ALPHAS: [f64; 3] = [0.2, 0.4, 0.6];
/// SUKP capacity as a fraction of the total element weight.
pub const SUKP_BETAS: [f64; 3] = [0.25, 0.5, 0.75];
/// BMCP budget as a fraction of the total item value.
pub const BMCP_BUDGETS: [f64; 3] = [0.2, 0.35, 0.5];
pub const MIN_SIZE: usize = 4;
pub const MAX_SIZE: usize = 12;

const SHAPE_SEED: u64 = 0x5eed;
const SUKP_SEED: u64 = 10_000;
const BMCP_SEED: u64 = 20_000;

#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub name: String,
    pub seed: u64,
    pub instance: Instance,
}

/// 200 SUKP followed by 200 BMCP instances with `m, n` in `[4, 12]`.
/// Density cycles through [`ALPHAS`], capacity through the kind's ratio list.
pub fn small_suite() -> Vec<SuiteInstance> {
    let mut shapes = ChaCha8Rng::seed_from_u64(SHAPE_SEED);
    let mut out = Vec::with_capacity(2 * PER_KIND);
    for (kind, base, ratios) in [
        (ProblemKind::Sukp, SUKP_SEED, SUKP_BETAS),
        (ProblemKind::Bmcp, BMCP_SEED, BMCP_BUDGETS),
    ] {
        for i in 0..PER_KIND {
            let m = shapes.gen_range(MIN_SIZE..=MAX_SIZE);
            let n = shapes.gen_range(MIN_SIZE..=MAX_SIZE);
            let spec = UniformSpec {
                kind,
                m,
                n,
                alpha: ALPHAS[i % 3],
                capacity: CapacitySpec::Ratio(ratios[(i / 3) % 3]),
                value_range: (1, 100),
                weight_range: (1, 100),
            };
            let seed = base + i as u64;
            let instance = generate_uniform(&spec, seed).expect("suite spec is valid");
            out.push(SuiteInstance {
                name: format!("{}_s{seed}", spec.name(&instance)),
                seed,
                instance,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_shape() {
        let suite = small_suite();
        assert_eq!(suite.len(), 400);
        assert!(suite[..200]
            .iter()
            .all(|s| s.instance.kind() == ProblemKind::Sukp));
        assert!(suite[200..]
            .iter()
            .all(|s| s.instance.kind() == ProblemKind::Bmcp));
        for s in &suite {
            assert!((MIN_SIZE..=MAX_SIZE).contains(&s.instance.m()));
            assert!((MIN_SIZE..=MAX_SIZE).contains(&s.instance.n()));
        }
        let names: std::collections::HashSet<_> = suite.iter().map(|s| &s.name).collect();
        assert_eq!(names.len(), 400);
    }

    #[test]
    fn suite_is_reproducible() {
        let a = small_suite();
        let b = small_suite();
        assert!(a.iter().zip(&b).all(|(x, y)| x.instance == y.instance));
    }
}

//! Solution-based tabu memory.
//!
//! Every solution maps to three hash values, each a sum of per-item weights
//! modulo `L`. The weight rows are `floor(j^1.2)`, `floor(j^1.6)` and
//! `floor(j^2)` over 1-based item positions, each row shuffled independently.
//! A solution is tabu when the bits addressed by all three hashes are set.
//! Collisions produce false positives but never false negatives.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::BitSet;

/// Default length of each hash bit vector.
pub const DEFAULT_TABU_LEN: u64 = 100_000_000;

/// Exponents of the three weight rows.
pub const GAMMAS: [f64; 3] = [1.2, 1.6, 2.0];

/// The same exponents as exact fractions `p / q`.
const GAMMA_FRACTIONS: [(u32, u32); 3] = [(6, 5), (8, 5), (2, 1)];

/// `floor(j^(p/q))`, exact whenever `j^p` fits in 128 bits.
fn floor_pow(j: u64, p: u32, q: u32) -> u64 {
    let approx = (j as f64).powf(p as f64 / q as f64).floor() as u64;
    let Some(target) = (j as u128).checked_pow(p) else {
        return approx;
    };
    let pow = |r: u64| (r as u128).checked_pow(q);
    let mut r = approx;
    while r > 0 && pow(r).is_none_or(|x| x > target) {
        r -= 1;
    }
    while pow(r + 1).is_some_and(|x| x <= target) {
        r += 1;
    }
    r
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SolutionHash(pub [u64; 3]);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashWeights {
    rows: [Vec<u64>; 3],
    modulus: u64,
}

impl HashWeights {
    /// Rows before shuffling: row `l` holds `floor(j^gamma_l)` for `j = 1..=m`.
    pub fn unshuffled(m: usize, modulus: u64) -> Self {
        assert!(modulus >= 1, "tabu length must be positive");
        let rows =
            GAMMA_FRACTIONS.map(|(p, q)| (1..=m as u64).map(|j| floor_pow(j, p, q)).collect());
        Self { rows, modulus }
    }

    /// Unshuffled rows, each then shuffled with `rng`.
    pub fn build<R: Rng + ?Sized>(m: usize, modulus: u64, rng: &mut R) -> Self {
        let mut weights = Self::unshuffled(m, modulus);
        for row in weights.rows.iter_mut() {
            row.shuffle(rng);
        }
        weights
    }

    pub fn rows(&self) -> &[Vec<u64>; 3] {
        &self.rows
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn m(&self) -> usize {
        self.rows[0].len()
    }

    /// Hash of the solution whose membership vector is `members`.
    pub fn hash(&self, members: &[bool]) -> SolutionHash {
        assert_eq!(members.len(), self.m(), "membership length mismatch");
        let mut h = [0u64; 3];
        for (l, row) in self.rows.iter().enumerate() {
            for (j, _) in members.iter().enumerate().filter(|(_, &y)| y) {
                h[l] = (h[l] + row[j] % self.modulus) % self.modulus;
            }
        }
        SolutionHash(h)
    }

    /// Hash of the solution obtained by adding (`adding`) or removing `item`.
    #[inline]
    pub fn toggle(&self, hash: SolutionHash, item: usize, adding: bool) -> SolutionHash {
        let l = self.modulus;
        let mut h = hash.0;
        for (hl, row) in h.iter_mut().zip(&self.rows) {
            let w = row[item] % l;
            *hl = if adding {
                (*hl + w) % l
            } else {
                (*hl + l - w) % l
            };
        }
        SolutionHash(h)
    }
}

#[derive(Clone, Debug)]
pub struct TabuStore {
    weights: HashWeights,
    vectors: [BitSet; 3],
}

impl TabuStore {
    /// Empty store; nothing is tabu.
    pub fn new(weights: HashWeights) -> Self {
        let len = weights.modulus as usize;
        Self {
            vectors: [BitSet::new(len), BitSet::new(len), BitSet::new(len)],
            weights,
        }
    }

    pub fn weights(&self) -> &HashWeights {
        &self.weights
    }

    #[inline]
    pub fn contains(&self, hash: SolutionHash) -> bool {
        self.vectors
            .iter()
            .zip(hash.0)
            .all(|(v, h)| v.contains(h as usize))
    }

    #[inline]
    pub fn insert(&mut self, hash: SolutionHash) {
        for (v, h) in self.vectors.iter_mut().zip(hash.0) {
            v.insert(h as usize);
        }
    }

    pub fn is_tabu(&self, members: &[bool]) -> bool {
        self.contains(self.weights.hash(members))
    }

    pub fn insert_solution(&mut self, members: &[bool]) {
        self.insert(self.weights.hash(members));
    }

    /// Bytes held by the three bit vectors (about 37.5 MB at the default length).
    pub fn memory_bytes(&self) -> usize {
        self.vectors.iter().map(BitSet::byte_size).sum()
    }
}

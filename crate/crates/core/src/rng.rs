//! Reproducible randomness.
//!
//! The generator is xoshiro256** seeded from a 64-bit seed through
//! SplitMix64 (the reference seeding of the xoshiro family). Derived
//! operations are specified here so other implementations can reproduce
//! the same instances:
//!
//! * `below(n)`: Lemire's multiply-shift with rejection on the low word
//!   (threshold `2^64 mod n`).
//! * `shuffle`: Fisher–Yates from the last index down, `j = below(i + 1)`.
//! * `bernoulli(p, q)`: `below(q) < p`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Debug, Clone)]
pub struct Rng {
    inner: Xoshiro256StarStar,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let mut m = (self.next_u64() as u128) * (n as u128);
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = (self.next_u64() as u128) * (n as u128);
            }
        }
        (m >> 64) as u64
    }

    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// True with probability `p / q`.
    pub fn bernoulli(&mut self, p: u64, q: u64) -> bool {
        self.below(q) < p
    }

    /// Uniform random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        self.shuffle(&mut perm);
        perm
    }
}

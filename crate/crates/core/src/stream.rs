//! Seeded randomness.
//!
//! The generator is pinned to ChaCha8 (`rand_chacha` 0.3) seeded through
//! `SeedableRng::seed_from_u64`, and uniforms come from `rand` 0.8's `Open01`
//! distribution, which never yields exactly 0 or 1. Both are portable, so a
//! seed reproduces the same samples on every platform.
//!
//! Per-trial seeds are derived from `(master_seed, trial_index)` with a
//! SplitMix64 finalizer, so a trial's stream does not depend on the order in
//! which trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for trial `index` of an experiment.
    pub fn for_trial(master_seed: u64, index: u64) -> Self {
        RandomStream::new(derive_seed(master_seed, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform<T: Scalar>(&mut self) -> T {
        T::open01(&mut self.rng)
    }

    /// `m` i.i.d. uniforms on (0, 1); advances the stream by exactly `m` draws.
    pub fn draw_dither<T: Scalar>(&mut self, m: usize) -> Vec<T> {
        let mut out = vec![T::zero(); m];
        self.fill_dither(&mut out);
        out
    }

    pub fn fill_dither<T: Scalar>(&mut self, out: &mut [T]) {
        for u in out.iter_mut() {
            *u = T::open01(&mut self.rng);
        }
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `(master_seed, index)` into a trial seed.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_advancing() {
        let mut a = RandomStream::new(7);
        let mut b = RandomStream::new(7);
        let a1: Vec<f64> = a.draw_dither(2);
        let a2: Vec<f64> = a.draw_dither(2);
        assert_ne!(a1, a2);
        assert_eq!(a1, b.draw_dither::<f64>(2));
        assert_eq!(a2, b.draw_dither::<f64>(2));
    }

    #[test]
    fn first_hundred_thousand_draws_match() {
        let mut a = RandomStream::new(0xDEADBEEF);
        let mut b = RandomStream::new(0xDEADBEEF);
        for _ in 0..100_000 {
            assert_eq!(a.uniform::<f64>().to_bits(), b.uniform::<f64>().to_bits());
        }
    }

    #[test]
    fn draws_stay_in_open_interval() {
        let mut s = RandomStream::new(1);
        for _ in 0..200_000 {
            let u: f64 = s.uniform();
            assert!(u > 0.0 && u < 1.0);
            let v: f32 = s.uniform();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn mean_of_a_million_draws() {
        // Oracle: the sample mean itself; the tolerance is ~7 standard errors.
        let mut s = RandomStream::new(2024);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| s.uniform::<f64>()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean = {mean}");
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> =
            (0..10_000).map(|k| derive_seed(42, k)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(derive_seed(1, 0), derive_seed(0, 1));
    }
}

//! Reproducible sampling of uniform random automata.
//!
//! The generator is SplitMix64, written out here so other implementations
//! can reproduce the same automata bit for bit:
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!          z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!          return z ^ (z >> 31)                       (all arithmetic mod 2⁶⁴)
//! next():  state = state + 0x9e3779b97f4a7c15; return mix(state)
//! ```
//!
//! The seed of trial `i` at size `n` under master seed `m` is
//! `mix(mix(mix(m) ^ n) ^ i)`. A value below `bound` is drawn by rejection:
//! draw `x = next()` until `x ≥ 2⁶⁴ mod bound`, then return `x mod bound`.
//! Transition targets are drawn in row-major order, `δ(0,0), δ(0,1), …,
//! δ(n-1,k-1)`, each uniform on `0..n`.

use crate::automaton::Dfa;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, n: usize, trial_index: u64) -> u64 {
    mix64(mix64(mix64(master) ^ n as u64) ^ trial_index)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `0..bound` without modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }
}

/// A uniformly random complete DFA with `n` states over `k` letters.
pub fn random_dfa(n: usize, k: usize, seed: u64) -> Dfa {
    assert!(n >= 1 && k >= 1);
    let mut rng = SplitMix64::new(seed);
    let delta = (0..n * k).map(|_| rng.below(n as u64) as usize).collect();
    Dfa::new(n, k, delta).expect("targets are below n")
}

/// The automaton of trial `trial_index` at size `n` under `master`.
pub fn trial_dfa(n: usize, k: usize, master: u64, trial_index: u64) -> Dfa {
    random_dfa(n, k, trial_seed(master, n, trial_index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_stream() {
        // First outputs for seed 0 of the public SplitMix64 reference.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(rng.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(rng.next_u64(), 0x06c45d188009454f);
    }

    #[test]
    fn single_state_is_forced() {
        for seed in 0..20 {
            assert_eq!(random_dfa(1, 2, seed).table(), &[0, 0]);
        }
    }

    #[test]
    fn deterministic() {
        let a = trial_dfa(10, 2, 7, 3);
        let b = trial_dfa(10, 2, 7, 3);
        assert_eq!(a, b);
        assert_ne!(a, trial_dfa(10, 2, 7, 4));
    }

    #[test]
    fn below_respects_bound() {
        let mut rng = SplitMix64::new(99);
        for bound in [1u64, 2, 3, 7, 100, u64::MAX] {
            for _ in 0..100 {
                assert!(rng.below(bound) < bound);
            }
        }
    }
}

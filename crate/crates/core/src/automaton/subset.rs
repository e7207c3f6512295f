//! Breadth-first search over the power-set automaton. Exponential, and used
//! as the independent oracle for the SAT pipeline.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{AutomatonError, Dfa, Letter, Word};

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 14;

impl Dfa {
    /// Shortest reset word by subset BFS from the full state set, refusing
    /// automata with more than [`DEFAULT_BRUTE_FORCE_LIMIT`] states.
    pub fn brute_force_shortest(&self) -> Result<Option<Word>, AutomatonError> {
        self.brute_force_shortest_with_limit(DEFAULT_BRUTE_FORCE_LIMIT)
    }

    /// As [`Dfa::brute_force_shortest`] with an explicit state limit
    /// (at most 64, the width of the subset bitmask).
    pub fn brute_force_shortest_with_limit(
        &self,
        limit: usize,
    ) -> Result<Option<Word>, AutomatonError> {
        let n = self.num_states();
        let limit = limit.min(64);
        if n > limit {
            return Err(AutomatonError::TooLargeForBruteForce { n, limit });
        }
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if full.count_ones() == 1 {
            return Ok(Some(Word::new()));
        }

        // parent[set] = (predecessor set, letter taken)
        let mut parent: HashMap<u64, (u64, Letter)> = HashMap::new();
        let mut queue = VecDeque::from([full]);
        parent.insert(full, (full, Letter(0)));
        while let Some(set) = queue.pop_front() {
            for x in self.letters() {
                let img = self.subset_step(set, x);
                if let Entry::Vacant(e) = parent.entry(img) {
                    e.insert((set, x));
                    if img.count_ones() == 1 {
                        return Ok(Some(trace_back(&parent, full, img)));
                    }
                    queue.push_back(img);
                }
            }
        }
        Ok(None)
    }

    fn subset_step(&self, mut set: u64, x: Letter) -> u64 {
        let mut img = 0u64;
        while set != 0 {
            let q = set.trailing_zeros() as usize;
            set &= set - 1;
            img |= 1u64 << self.step(q, x);
        }
        img
    }
}

fn trace_back(parent: &HashMap<u64, (u64, Letter)>, full: u64, mut set: u64) -> Word {
    let mut letters = Vec::new();
    while set != full {
        let (prev, x) = parent[&set];
        letters.push(x);
        set = prev;
    }
    letters.reverse();
    Word::from(letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let one = Dfa::new(1, 2, vec![0, 0]).unwrap();
        assert_eq!(one.brute_force_shortest().unwrap(), Some(Word::new()));
        let constant = Dfa::from_fn(5, 2, |_, _| 2).unwrap();
        assert_eq!(constant.brute_force_shortest().unwrap().unwrap().len(), 1);
    }

    #[test]
    fn cerny_series() {
        for n in 2..=7 {
            let c = Dfa::cerny(n);
            let w = c.brute_force_shortest().unwrap().unwrap();
            assert_eq!(w.len(), (n - 1) * (n - 1), "C_{n}");
            assert!(c.verify_reset_word(&w));
        }
    }

    #[test]
    fn permutations_have_no_reset_word() {
        let perm = Dfa::from_fn(5, 2, |q, x| match x {
            Letter::A => (q + 1) % 5,
            _ => (q + 2) % 5,
        })
        .unwrap();
        assert_eq!(perm.brute_force_shortest().unwrap(), None);
    }

    #[test]
    fn refuses_large_automata() {
        let big = Dfa::cerny(15);
        assert_eq!(
            big.brute_force_shortest(),
            Err(AutomatonError::TooLargeForBruteForce { n: 15, limit: 14 })
        );
        assert_eq!(
            big.brute_force_shortest_with_limit(16).unwrap().unwrap().len(),
            196
        );
    }
}

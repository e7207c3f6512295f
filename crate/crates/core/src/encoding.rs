//! Reduction of "does `A` have a reset word of length exactly `c`?" to a
//! 3-CNF formula over a two-letter alphabet.
//!
//! Variables:
//! * `u_t` for `t ∈ 1..=c`: the `t`-th letter is `a` when true, `b` when false.
//! * `x_{q,t}` for `q ∈ Q`, `t ∈ 0..=c`: state `q` may be occupied after the
//!   first `t` letters. Truth is forced upward by implications and never
//!   forced downward.
//!
//! Clauses, emitted in this order:
//! 1. `x_{q,0}` for every `q`;
//! 2. for `t ∈ 0..c` and every `q`, `¬x_{q,t} ∨ ¬u_{t+1} ∨ x_{qa,t+1}`
//!    followed by `¬x_{q,t} ∨ u_{t+1} ∨ x_{qb,t+1}`;
//! 3. `¬x_{q,c} ∨ ¬x_{p,c}` for every pair `p < q`.
//!
//! That is `(c+1)n + c` variables, `n(n-1)/2 + n(2c+1)` clauses, and
//! `n² + 6cn` literals.

use thiserror::Error;

use crate::automaton::{Dfa, Letter, State, Word};
use crate::cnf::{CnfFormula, Lit};
use crate::solver::Assignment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("the encoding needs a two-letter alphabet, got {0} letters")]
    UnsupportedAlphabet(usize),
    #[error("formula with {0} variables does not fit 32-bit variable ids")]
    TooLarge(u64),
}

/// Variable-id layout of one encoding: `u_t ↦ t` and
/// `x_{q,t} ↦ c + t·n + q + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarMap {
    n: usize,
    c: usize,
}

/// What a variable id stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarMeaning {
    Letter { t: usize },
    Occupied { state: State, t: usize },
}

impl VarMap {
    pub fn new(n: usize, c: usize) -> Self {
        VarMap { n, c }
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> usize {
        self.c
    }

    pub fn num_vars(&self) -> usize {
        (self.c + 1) * self.n + self.c
    }

    /// Id of `u_t`, `1 ≤ t ≤ c`.
    pub fn letter(&self, t: usize) -> u32 {
        debug_assert!((1..=self.c).contains(&t));
        t as u32
    }

    /// Id of `x_{q,t}`, `0 ≤ t ≤ c`.
    pub fn occupied(&self, q: State, t: usize) -> u32 {
        debug_assert!(q < self.n && t <= self.c);
        (self.c + t * self.n + q + 1) as u32
    }

    pub fn meaning(&self, var: u32) -> Option<VarMeaning> {
        let v = var as usize;
        if v == 0 || v > self.num_vars() {
            None
        } else if v <= self.c {
            Some(VarMeaning::Letter { t: v })
        } else {
            let offset = v - self.c - 1;
            Some(VarMeaning::Occupied {
                state: offset % self.n,
                t: offset / self.n,
            })
        }
    }
}

pub fn encode(dfa: &Dfa, c: usize) -> Result<(CnfFormula, VarMap), EncodeError> {
    if dfa.alphabet_size() != 2 {
        return Err(EncodeError::UnsupportedAlphabet(dfa.alphabet_size()));
    }
    let n = dfa.num_states();
    let vm = VarMap::new(n, c);
    let total = vm.num_vars() as u64;
    if total > i32::MAX as u64 {
        return Err(EncodeError::TooLarge(total));
    }

    let mut f = CnfFormula::new(total as u32);
    let mut add = |lits: &[Lit]| f.push(lits.to_vec()).expect("encoding clauses are well formed");

    for q in 0..n {
        add(&[Lit::positive(vm.occupied(q, 0))]);
    }
    for t in 0..c {
        let u = vm.letter(t + 1);
        for q in 0..n {
            let here = Lit::negative(vm.occupied(q, t));
            let qa = dfa.step(q, Letter::A);
            let qb = dfa.step(q, Letter::B);
            add(&[here, Lit::negative(u), Lit::positive(vm.occupied(qa, t + 1))]);
            add(&[here, Lit::positive(u), Lit::positive(vm.occupied(qb, t + 1))]);
        }
    }
    for q in 0..n {
        for p in 0..q {
            add(&[
                Lit::negative(vm.occupied(q, c)),
                Lit::negative(vm.occupied(p, c)),
            ]);
        }
    }
    Ok((f, vm))
}

/// Reads the word off the letter variables: `u_t` true means `a`.
pub fn decode_word(asg: &Assignment, vm: &VarMap) -> Word {
    (1..=vm.length())
        .map(|t| {
            if asg.value(vm.letter(t)) {
                Letter::A
            } else {
                Letter::B
            }
        })
        .collect()
}

/// The model the reduction's correctness argument builds from a word:
/// letters from `w`, and `x_{q,t}` true exactly on the image after `t`
/// letters.
pub fn witness_assignment(dfa: &Dfa, w: &Word, vm: &VarMap) -> Assignment {
    let mut values = vec![false; vm.num_vars()];
    let mut current = dfa.all_states();
    for (i, &x) in w.letters().iter().enumerate() {
        values[vm.letter(i + 1) as usize - 1] = x == Letter::A;
    }
    for t in 0..=vm.length() {
        if t > 0 {
            let step = Word::from(vec![w.letters()[t - 1]]);
            current = dfa.image(&current, &step);
        }
        for &q in &current {
            values[vm.occupied(q, t) as usize - 1] = true;
        }
    }
    Assignment::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::check_model;

    fn counts(f: &CnfFormula) -> (u32, usize, usize) {
        (f.num_vars(), f.num_clauses(), f.num_literals())
    }

    #[test]
    fn single_state_zero_length() {
        let one = Dfa::new(1, 2, vec![0, 0]).unwrap();
        let (f, _) = encode(&one, 0).unwrap();
        assert_eq!(counts(&f), (1, 1, 1));
        assert_eq!(f.to_dimacs(), "p cnf 1 1\n1 0\n");
    }

    #[test]
    fn cerny_c4_counts() {
        let (f, _) = encode(&Dfa::cerny(4), 9).unwrap();
        assert_eq!(counts(&f), (49, 82, 232));
        assert!(f.to_dimacs().starts_with("p cnf 49 82\n"));
    }

    #[test]
    fn rejects_other_alphabets() {
        let d = Dfa::from_fn(2, 3, |_, _| 0).unwrap();
        assert_eq!(encode(&d, 1), Err(EncodeError::UnsupportedAlphabet(3)));
    }

    #[test]
    fn var_layout_is_a_bijection() {
        let vm = VarMap::new(3, 4);
        let mut seen = vec![false; vm.num_vars() + 1];
        for t in 1..=4 {
            let v = vm.letter(t);
            assert_eq!(vm.meaning(v), Some(VarMeaning::Letter { t }));
            seen[v as usize] = true;
        }
        for t in 0..=4 {
            for q in 0..3 {
                let v = vm.occupied(q, t);
                assert_eq!(vm.meaning(v), Some(VarMeaning::Occupied { state: q, t }));
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
            }
        }
        assert!(seen[1..].iter().all(|&s| s));
        assert_eq!(vm.meaning(0), None);
        assert_eq!(vm.meaning(vm.num_vars() as u32 + 1), None);
    }

    #[test]
    fn clause_order_for_small_instance() {
        // n = 2 constant automaton, c = 1: ids u1=1, x00=2, x10=3, x01=4, x11=5.
        let d = Dfa::from_fn(2, 2, |_, _| 0).unwrap();
        let (f, _) = encode(&d, 1).unwrap();
        assert_eq!(
            f.to_dimacs(),
            "p cnf 5 7\n2 0\n3 0\n-2 -1 4 0\n-2 1 4 0\n-3 -1 4 0\n-3 1 4 0\n-5 -4 0\n"
        );
    }

    #[test]
    fn decode_examples() {
        let vm = VarMap::new(1, 0);
        assert_eq!(decode_word(&Assignment::from_values(vec![true]), &vm), Word::new());
        let vm = VarMap::new(1, 1);
        let w = decode_word(&Assignment::from_values(vec![true, false, false]), &vm);
        assert_eq!(w.to_string(), "a");
        let vm = VarMap::new(1, 2);
        let w = decode_word(&Assignment::from_values(vec![false, true, false, false, false]), &vm);
        assert_eq!(w.to_string(), "ba");
    }

    #[test]
    fn witness_of_a_reset_word_satisfies_the_formula() {
        let c4 = Dfa::cerny(4);
        let w: Word = "baaabaaab".parse().unwrap();
        let (f, vm) = encode(&c4, 9).unwrap();
        let asg = witness_assignment(&c4, &w, &vm);
        assert!(check_model(&f, &asg));
        assert_eq!(decode_word(&asg, &vm), w);
        // A non-reset word of the same length violates a type-3 clause.
        let bad: Word = "aaaaaaaaa".parse().unwrap();
        assert!(!check_model(&f, &witness_assignment(&c4, &bad, &vm)));
    }
}

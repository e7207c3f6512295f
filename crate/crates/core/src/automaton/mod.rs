//! Complete deterministic automata over a small alphabet, words, and the
//! synchronization toolbox built on top of them.
//!
//! States are dense indices `0..n`, letters dense indices `0..k`. Letter 0
//! prints as `a`, letter 1 as `b`, and so on.

mod pairs;
mod subset;
mod text;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use pairs::MergeTable;
pub use subset::DEFAULT_BRUTE_FORCE_LIMIT;
pub use text::ParseError;

pub type State = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

impl Letter {
    pub const A: Letter = Letter(0);
    pub const B: Letter = Letter(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 26 {
            write!(f, "{}", (b'a' + self.0 as u8) as char)
        } else {
            write!(f, "<{}>", self.0)
        }
    }
}

/// A finite sequence of letters. The empty word is the identity action.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// `self · other`
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid letter {0:?} in word (expected a-z)")]
pub struct InvalidLetter(pub char);

impl FromStr for Word {
    type Err = InvalidLetter;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Ok(Letter((c as u8 - b'a') as usize))
                } else {
                    Err(InvalidLetter(c))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("an automaton needs at least one state")]
    NoStates,
    #[error("an automaton needs at least one letter")]
    EmptyAlphabet,
    #[error("transition table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("transition from state {state} on letter {letter} targets {target}, but there are only {n} states")]
    TargetOutOfRange {
        state: State,
        letter: usize,
        target: State,
        n: usize,
    },
    #[error("subset search refuses {n} states (limit {limit})")]
    TooLargeForBruteForce { n: usize, limit: usize },
}

/// A complete DFA `(Q, Σ, δ)` without initial or final states.
///
/// The transition table is stored row-major: `delta[q * k + x] = δ(q, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    n: usize,
    k: usize,
    delta: Vec<State>,
}

impl Dfa {
    pub fn new(n: usize, k: usize, delta: Vec<State>) -> Result<Self, AutomatonError> {
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        if k == 0 {
            return Err(AutomatonError::EmptyAlphabet);
        }
        if delta.len() != n * k {
            return Err(AutomatonError::TableSize {
                expected: n * k,
                found: delta.len(),
            });
        }
        if let Some((i, &target)) = delta.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(AutomatonError::TargetOutOfRange {
                state: i / k,
                letter: i % k,
                target,
                n,
            });
        }
        Ok(Dfa { n, k, delta })
    }

    pub fn from_fn(
        n: usize,
        k: usize,
        f: impl Fn(State, Letter) -> State,
    ) -> Result<Self, AutomatonError> {
        let delta = (0..n)
            .flat_map(|q| (0..k).map(move |x| (q, x)))
            .map(|(q, x)| f(q, Letter(x)))
            .collect();
        Dfa::new(n, k, delta)
    }

    /// The Černý automaton `C_n`: `a` rotates `i ↦ i+1 mod n`, `b` sends
    /// state 0 to state 1 and fixes everything else. Its shortest reset
    /// word has length `(n-1)²`.
    pub fn cerny(n: usize) -> Self {
        assert!(n >= 1, "Černý automaton needs at least one state");
        Dfa::from_fn(n, 2, |q, x| match x {
            Letter::A => (q + 1) % n,
            _ if q == 0 => 1 % n,
            _ => q,
        })
        .expect("Černý table is in range")
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[State] {
        &self.delta
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.k).map(Letter)
    }

    #[inline]
    pub fn step(&self, q: State, x: Letter) -> State {
        debug_assert!(q < self.n && x.0 < self.k);
        self.delta[q * self.k + x.0]
    }

    pub fn is_valid_word(&self, w: &Word) -> bool {
        w.letters().iter().all(|l| l.0 < self.k)
    }

    /// `q·w`, folding δ over the letters of `w` from the left.
    pub fn apply_word(&self, q: State, w: &Word) -> State {
        w.letters().iter().fold(q, |s, &x| self.step(s, x))
    }

    /// `{ q·w : q ∈ states }`, returned sorted and deduplicated.
    pub fn image(&self, states: &[State], w: &Word) -> Vec<State> {
        let mut present = vec![false; self.n];
        for &q in states {
            present[self.apply_word(q, w)] = true;
        }
        present
            .iter()
            .enumerate()
            .filter_map(|(q, &p)| p.then_some(q))
            .collect()
    }

    pub fn all_states(&self) -> Vec<State> {
        (0..self.n).collect()
    }

    /// True iff `w` sends every state to one common state.
    pub fn verify_reset_word(&self, w: &Word) -> bool {
        if !self.is_valid_word(w) {
            return false;
        }
        let target = self.apply_word(0, w);
        (1..self.n).all(|q| self.apply_word(q, w) == target)
    }

    /// Polynomial synchronizability test: every pair of states must be
    /// mergeable by some word. Runs in `O(n²·k)`.
    pub fn is_synchronizing(&self) -> bool {
        self.n == 1 || MergeTable::build(self).all_pairs_mergeable()
    }
}

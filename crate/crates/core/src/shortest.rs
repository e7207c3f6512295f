//! Exact shortest reset words by binary search over SAT queries.
//!
//! The search keeps `l < ℓ ≤ r`, probes `c = ⌊(l + r) / 2⌋`, and stops when
//! `c == l`, at which point `r` is the answer. `l = 0` is sound for every
//! automaton with two or more states since the empty word cannot reset it.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automaton::{Dfa, Word};
use crate::encoding::{decode_word, encode, EncodeError};
use crate::solver::{SatBackend, SolveError, SolveResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShortestError {
    #[error("automaton is not synchronizing")]
    NotSynchronizing,
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    /// A model decoded to a word that does not reset the automaton. This
    /// is a bug in the encoding or the solver, never a property of the input.
    #[error("decoded word of length {length} is not a reset word")]
    UnverifiedWord { length: usize },
    #[error("no reset word of length {0}, although one was expected")]
    MissingWord(usize),
}

/// Where the search interval starts on the right.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum InitialBound {
    /// Length of the greedy pair-merging word.
    #[default]
    Greedy,
    /// `n³`, which every synchronizing automaton satisfies.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Query {
    pub length: usize,
    pub satisfiable: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestResult {
    pub length: usize,
    pub word: Word,
    pub initial_bound: usize,
    /// SAT queries in the order they were issued.
    pub queries: Vec<Query>,
}

/// A reset word of length exactly `c`, if one exists. By extension closure
/// this also answers whether some reset word of length `≤ c` exists.
pub fn synchro_word(
    dfa: &Dfa,
    c: usize,
    backend: &dyn SatBackend,
) -> Result<Option<Word>, ShortestError> {
    let (formula, vm) = encode(dfa, c)?;
    match backend.solve(&formula)? {
        SolveResult::Unsat => Ok(None),
        SolveResult::Sat(asg) => {
            let w = decode_word(&asg, &vm);
            if dfa.verify_reset_word(&w) {
                Ok(Some(w))
            } else {
                Err(ShortestError::UnverifiedWord { length: c })
            }
        }
    }
}

pub fn shortest_reset_word(
    dfa: &Dfa,
    backend: &dyn SatBackend,
    bound: InitialBound,
) -> Result<ShortestResult, ShortestError> {
    let n = dfa.num_states();
    if n == 1 {
        return Ok(ShortestResult {
            length: 0,
            word: Word::new(),
            initial_bound: 0,
            queries: Vec::new(),
        });
    }
    if !dfa.is_synchronizing() {
        return Err(ShortestError::NotSynchronizing);
    }
    let (mut r, mut best) = match bound {
        InitialBound::Greedy => {
            let w = dfa
                .greedy_upper_bound()
                .ok_or(ShortestError::NotSynchronizing)?;
            (w.len(), Some(w))
        }
        InitialBound::Cubic => (n * n * n, None),
    };
    let initial_bound = r;
    let mut l = 0;
    let mut queries = Vec::new();
    let probe = |c: usize, queries: &mut Vec<Query>| {
        let started = Instant::now();
        let found = synchro_word(dfa, c, backend)?;
        queries.push(Query {
            length: c,
            satisfiable: found.is_some(),
            elapsed: started.elapsed(),
        });
        Ok::<_, ShortestError>(found)
    };

    loop {
        let c = (l + r) / 2;
        if c == l {
            let word = match best {
                Some(w) => w,
                None => probe(r, &mut queries)?.ok_or(ShortestError::MissingWord(r))?,
            };
            debug_assert_eq!(word.len(), r);
            return Ok(ShortestResult {
                length: r,
                word,
                initial_bound,
                queries,
            });
        }
        match probe(c, &mut queries)? {
            Some(w) => {
                r = c;
                best = Some(w);
            }
            None => l = c,
        }
    }
}

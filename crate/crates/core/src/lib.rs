//! Shortest reset words of deterministic finite automata, computed exactly
//! by binary search over SAT queries, and a Monte Carlo harness measuring
//! how their length grows on uniformly random two-letter automata.

pub mod automaton;
pub mod cli;
pub mod cnf;
pub mod encoding;
pub mod experiment;
pub mod random;
pub mod shortest;
pub mod solver;

pub use automaton::{Dfa, Letter, State, Word};
pub use cnf::{Clause, CnfFormula, Lit};
pub use encoding::{decode_word, encode, VarMap};
pub use shortest::{shortest_reset_word, synchro_word, InitialBound, ShortestResult};
pub use solver::{check_model, Assignment, Budget, SatBackend, SolveResult};

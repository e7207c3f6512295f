#![allow(dead_code)]

use synchro::cnf::{CnfFormula, Lit};
use synchro::random::SplitMix64;

/// Satisfiability by trying every assignment. Only for tiny formulas.
pub fn enumerate_sat(f: &CnfFormula) -> bool {
    let n = f.num_vars();
    assert!(n <= 24, "too many variables to enumerate");
    let masks: Vec<(u32, u32)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    (0u32..(1 << n)).any(|a| masks.iter().all(|&(pos, neg)| (a & pos) | (!a & neg) != 0))
}

/// A random CNF with 1 to `max_vars` variables and clauses of 1 to 4
/// distinct literals, around the 3-SAT threshold density.
pub fn random_formula(rng: &mut SplitMix64, max_vars: u32) -> CnfFormula {
    let vars = 1 + rng.below(max_vars as u64) as u32;
    let clauses = rng.below(5 * vars as u64 + 1);
    let mut f = CnfFormula::new(vars);
    for _ in 0..clauses {
        let len = 1 + rng.below(4.min(vars as u64));
        let mut lits: Vec<Lit> = Vec::new();
        while (lits.len() as u64) < len {
            let v = 1 + rng.below(vars as u64) as u32;
            if lits.iter().all(|l| l.var() != v) {
                lits.push(Lit::new(v, rng.below(2) == 1));
            }
        }
        f.push(lits).unwrap();
    }
    f
}

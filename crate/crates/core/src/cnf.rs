//! Propositional formulas in conjunctive normal form and DIMACS I/O.

use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A literal over a 1-based variable id, as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn positive(var: u32) -> Lit {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable ids start at 1");
        Lit(var as i32)
    }

    pub fn negative(var: u32) -> Lit {
        !Lit::positive(var)
    }

    pub fn new(var: u32, positive: bool) -> Lit {
        if positive {
            Lit::positive(var)
        } else {
            Lit::negative(var)
        }
    }

    pub fn from_dimacs(value: i32) -> Option<Lit> {
        (value != 0 && value != i32::MIN).then_some(Lit(value))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("clauses must contain at least one literal")]
    EmptyClause,
    #[error("variable {0} occurs twice in one clause")]
    DuplicateVariable(u32),
    #[error("literal {lit} exceeds the declared {num_vars} variables")]
    VariableOutOfRange { lit: i32, num_vars: u32 },
}

/// A non-empty disjunction with no variable repeated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Result<Clause, CnfError> {
        if lits.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        for (i, a) in lits.iter().enumerate() {
            if lits[..i].iter().any(|b| b.var() == a.var()) {
                return Err(CnfError::DuplicateVariable(a.var()));
            }
        }
        Ok(Clause(lits))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn num_literals(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn add_clause(&mut self, clause: Clause) -> Result<(), CnfError> {
        if let Some(l) = clause.lits().iter().find(|l| l.var() > self.num_vars) {
            return Err(CnfError::VariableOutOfRange {
                lit: l.to_dimacs(),
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Shorthand for building clauses from literals known to be valid.
    pub fn push(&mut self, lits: impl Into<Vec<Lit>>) -> Result<(), CnfError> {
        self.add_clause(Clause::new(lits.into())?)
    }

    /// DIMACS CNF text: a `p cnf` header and one zero-terminated clause per
    /// line, in insertion order.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DIMACS line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

/// Reads DIMACS CNF. Comment lines start with `c`; clauses may span lines.
/// Repeated literals inside a clause are merged and tautological clauses
/// are dropped, so the result satisfies the [`Clause`] invariants. Empty
/// clauses are rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut formula: Option<CnfFormula> = None;
    let mut pending: Vec<Lit> = Vec::new();
    let mut last_line = 1;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let fail = |message: String| DimacsError {
            line: line_no,
            message,
        };
        if line.starts_with('p') {
            if formula.is_some() {
                return Err(fail("duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let ["p", "cnf", v, _] = parts[..] else {
                return Err(fail("expected `p cnf <vars> <clauses>`".into()));
            };
            let v = v
                .parse()
                .map_err(|_| fail(format!("bad variable count {v:?}")))?;
            formula = Some(CnfFormula::new(v));
            continue;
        }
        let Some(f) = formula.as_mut() else {
            return Err(fail("clause before problem line".into()));
        };
        for tok in line.split_whitespace() {
            let v: i32 = tok.parse().map_err(|_| fail(format!("bad literal {tok:?}")))?;
            if v == 0 {
                if pending.is_empty() {
                    return Err(fail("empty clause".into()));
                }
                if let Some(clause) = normalize(std::mem::take(&mut pending)) {
                    f.add_clause(clause).map_err(|e| fail(e.to_string()))?;
                }
                continue;
            }
            let lit = Lit::from_dimacs(v).ok_or_else(|| fail(format!("bad literal {tok:?}")))?;
            if lit.var() > f.num_vars() {
                return Err(fail(format!(
                    "literal {v} exceeds {} variables",
                    f.num_vars()
                )));
            }
            pending.push(lit);
        }
    }
    let formula = formula.ok_or_else(|| DimacsError {
        line: last_line,
        message: "missing problem line".into(),
    })?;
    if !pending.is_empty() {
        return Err(DimacsError {
            line: last_line,
            message: "last clause is not terminated by 0".into(),
        });
    }
    Ok(formula)
}

fn normalize(lits: Vec<Lit>) -> Option<Clause> {
    let mut kept: Vec<Lit> = Vec::with_capacity(lits.len());
    for l in lits {
        if kept.contains(&!l) {
            return None;
        }
        if !kept.contains(&l) {
            kept.push(l);
        }
    }
    Clause::new(kept).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_examples() {
        assert_eq!(CnfFormula::new(0).to_dimacs(), "p cnf 0 0\n");
        let mut f = CnfFormula::new(1);
        f.push([Lit::positive(1)]).unwrap();
        assert_eq!(f.to_dimacs(), "p cnf 1 1\n1 0\n");
    }

    #[test]
    fn clause_invariants() {
        assert_eq!(Clause::new(vec![]), Err(CnfError::EmptyClause));
        assert_eq!(
            Clause::new(vec![Lit::positive(2), Lit::negative(2)]),
            Err(CnfError::DuplicateVariable(2))
        );
        let mut f = CnfFormula::new(2);
        assert_eq!(
            f.push([Lit::negative(3)]),
            Err(CnfError::VariableOutOfRange { lit: -3, num_vars: 2 })
        );
    }

    #[test]
    fn parse_roundtrip_and_normalization() {
        let text = "c demo\np cnf 3 3\n1 -2 0\n2 3\n -1 0\n3 3 -3 0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.num_vars(), 3);
        // the tautology is dropped
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.clauses()[1].lits().len(), 3);
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_dimacs("1 0\n").unwrap_err().line, 1);
        assert_eq!(parse_dimacs("p cnf 1 1\n2 0\n").unwrap_err().line, 2);
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n").unwrap_err().line, 2);
        assert_eq!(parse_dimacs("p cnf 1 1\n0\n").unwrap_err().line, 2);
        assert!(parse_dimacs("").is_err());
    }
}

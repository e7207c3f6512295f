//! Propositional satisfiability: an in-process CDCL solver and a bridge to
//! external DIMACS solvers, behind one [`SatBackend`] trait.

mod cdcl;
mod external;
mod heap;

use std::time::Duration;

use thiserror::Error;

use crate::cnf::CnfFormula;

pub use cdcl::{RestartPolicy, Solver, SolverConfig, SolverStats};
pub use external::{parse_competition_output, ExternalSolver};

/// A total truth assignment, indexed by 1-based variable id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    /// `values[i]` is the value of variable `i + 1`.
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Values as signed DIMACS literals, `v` or `-v`.
    pub fn to_dimacs_lits(&self) -> Vec<i32> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as i32 + 1 } else { -(i as i32 + 1) })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

/// Optional per-call limits. The default is unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn conflicts(limit: u64) -> Self {
        Budget {
            conflicts: Some(limit),
            time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    /// The limit was hit before a verdict; retry with a larger budget.
    #[error("solver budget exhausted after {conflicts} conflicts")]
    BudgetExceeded { conflicts: u64 },
    #[error("external solver failed: {0}")]
    External(String),
    #[error("solver produced an assignment that violates the formula")]
    InvalidModel,
}

/// True iff every clause of `f` has a literal made true by `asg`.
pub fn check_model(f: &CnfFormula, asg: &Assignment) -> bool {
    if asg.num_vars() < f.num_vars() as usize {
        return false;
    }
    f.clauses().iter().all(|c| {
        c.lits()
            .iter()
            .any(|l| asg.value(l.var()) == l.is_positive())
    })
}

/// Anything that can decide a CNF formula. Returned models have already
/// been checked against the formula.
pub trait SatBackend: Send + Sync {
    fn solve(&self, formula: &CnfFormula) -> Result<SolveResult, SolveError>;
}

/// The built-in CDCL solver with a fixed configuration and budget.
#[derive(Debug, Clone, Copy, Default)]
pub struct InternalSolver {
    pub config: SolverConfig,
    pub budget: Budget,
}

impl InternalSolver {
    pub fn with_budget(budget: Budget) -> Self {
        InternalSolver {
            config: SolverConfig::default(),
            budget,
        }
    }
}

impl SatBackend for InternalSolver {
    fn solve(&self, formula: &CnfFormula) -> Result<SolveResult, SolveError> {
        let result = Solver::new(formula, self.config).solve(self.budget)?;
        if let SolveResult::Sat(asg) = &result {
            if !check_model(formula, asg) {
                return Err(SolveError::InvalidModel);
            }
        }
        Ok(result)
    }
}

/// Decides `formula` with the built-in solver and default settings.
pub fn solve(formula: &CnfFormula, budget: Budget) -> Result<SolveResult, SolveError> {
    InternalSolver::with_budget(budget).solve(formula)
}

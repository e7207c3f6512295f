//! Bridge to an external solver speaking the SAT-competition protocol: the
//! DIMACS file path is appended to the configured command, and stdout must
//! carry an `s SATISFIABLE` / `s UNSATISFIABLE` line plus `v` value lines.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{check_model, Assignment, SatBackend, SolveError, SolveResult};
use crate::cnf::CnfFormula;

static NEXT_FILE: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
}

impl ExternalSolver {
    /// `command` is split on whitespace: program first, then arguments.
    pub fn from_command_line(command: &str) -> Result<Self, SolveError> {
        let mut parts = command.split_whitespace().map(str::to_owned);
        let program = parts
            .next()
            .ok_or_else(|| SolveError::External("empty solver command".into()))?;
        Ok(ExternalSolver {
            program,
            args: parts.collect(),
        })
    }

    fn scratch_path() -> PathBuf {
        let id = NEXT_FILE.fetch_add(1, Ordering::Relaxed);
        std::env::temp_dir().join(format!("synchro-{}-{id}.cnf", std::process::id()))
    }
}

impl SatBackend for ExternalSolver {
    fn solve(&self, formula: &CnfFormula) -> Result<SolveResult, SolveError> {
        let path = Self::scratch_path();
        fs::write(&path, formula.to_dimacs())
            .map_err(|e| SolveError::External(format!("writing {}: {e}", path.display())))?;
        let output = Command::new(&self.program).args(&self.args).arg(&path).output();
        let _ = fs::remove_file(&path);
        let output = output
            .map_err(|e| SolveError::External(format!("running {}: {e}", self.program)))?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        let result = parse_competition_output(&stdout, formula.num_vars() as usize)?;
        if let SolveResult::Sat(asg) = &result {
            if !check_model(formula, asg) {
                return Err(SolveError::InvalidModel);
            }
        }
        Ok(result)
    }
}

/// Parses SAT-competition output. Variables missing from the `v` lines
/// default to false.
pub fn parse_competition_output(text: &str, num_vars: usize) -> Result<SolveResult, SolveError> {
    let mut status = None;
    let mut values = vec![false; num_vars];
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => true,
                "UNSATISFIABLE" => false,
                other => {
                    return Err(SolveError::External(format!("solver answered {other:?}")));
                }
            });
        } else if let Some(rest) = line.strip_prefix('v') {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| SolveError::External(format!("bad value token {tok:?}")))?;
                let var = lit.unsigned_abs() as usize;
                if var == 0 {
                    continue;
                }
                if var > num_vars {
                    return Err(SolveError::External(format!(
                        "value for unknown variable {var}"
                    )));
                }
                values[var - 1] = lit > 0;
            }
        }
    }
    match status {
        Some(true) => Ok(SolveResult::Sat(Assignment::from_values(values))),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(SolveError::External("no `s` status line in solver output".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sat_output() {
        let out = "c hello\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        assert_eq!(
            parse_competition_output(out, 3).unwrap(),
            SolveResult::Sat(Assignment::from_values(vec![true, false, true]))
        );
    }

    #[test]
    fn parses_unsat_and_errors() {
        assert_eq!(
            parse_competition_output("s UNSATISFIABLE\n", 2).unwrap(),
            SolveResult::Unsat
        );
        assert!(parse_competition_output("s UNKNOWN\n", 2).is_err());
        assert!(parse_competition_output("", 2).is_err());
        assert!(parse_competition_output("s SATISFIABLE\nv 5 0\n", 2).is_err());
    }

    #[test]
    fn empty_command_rejected() {
        assert!(ExternalSolver::from_command_line("  ").is_err());
    }
}

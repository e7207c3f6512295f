//! Command-line interface. Exit codes, shared by every subcommand:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, or a positive answer |
//! | 1 | negative answer (not synchronizing, unsatisfiable) |
//! | 2 | bad input: usage, unreadable or malformed files |
//! | 3 | a solver budget ran out |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::automaton::{Dfa, DEFAULT_BRUTE_FORCE_LIMIT};
use crate::cnf::parse_dimacs;
use crate::encoding::encode;
use crate::experiment::{
    fit_power_law, run_trials_with, summarize_all, write_outputs, Profile, RunConfig,
    RunMetadata, TrialRecord, DEFAULT_N_MIN,
};
use crate::random::{random_dfa, trial_dfa};
use crate::shortest::{shortest_reset_word, InitialBound, ShortestError};
use crate::solver::{
    Budget, ExternalSolver, InternalSolver, SatBackend, SolveError, SolveResult, Solver,
    SolverConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "synchro", version, about = "Shortest reset words of synchronizing automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Internal,
    External,
}

#[derive(Debug, clap::Args)]
struct SolverArgs {
    /// SAT backend.
    #[arg(long, value_enum, default_value = "internal")]
    solver: SolverKind,
    /// Command for the external solver; the DIMACS path is appended.
    #[arg(long, value_name = "CMD")]
    solver_cmd: Option<String>,
    /// Conflict limit per SAT query (internal solver only).
    #[arg(long, value_name = "CONFLICTS")]
    budget: Option<u64>,
    /// Start the binary search at n³ instead of the greedy word length.
    #[arg(long)]
    fig1_exact: bool,
}

impl SolverArgs {
    fn backend(&self) -> Result<Box<dyn SatBackend>, String> {
        match self.solver {
            SolverKind::Internal => {
                if self.solver_cmd.is_some() {
                    return Err("--solver-cmd needs --solver external".into());
                }
                let budget = Budget {
                    conflicts: self.budget,
                    time: None,
                };
                Ok(Box::new(InternalSolver::with_budget(budget)))
            }
            SolverKind::External => {
                if self.budget.is_some() {
                    return Err("--budget applies to the internal solver only".into());
                }
                let cmd = self
                    .solver_cmd
                    .as_deref()
                    .ok_or("--solver external needs --solver-cmd")?;
                Ok(Box::new(ExternalSolver::from_command_line(cmd).map_err(|e| e.to_string())?))
            }
        }
    }

    fn bound(&self) -> InitialBound {
        if self.fig1_exact {
            InitialBound::Cubic
        } else {
            InitialBound::Greedy
        }
    }

    fn describe(&self) -> String {
        match (self.solver, &self.solver_cmd) {
            (SolverKind::External, Some(cmd)) => format!("external: {cmd}"),
            _ => "internal".into(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether an automaton is synchronizing.
    Check {
        /// Automaton file, or `-` for standard input.
        file: PathBuf,
    },
    /// Find a shortest reset word with SAT queries.
    Shortest {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the CNF formula for reset words of length `c` as DIMACS.
    Encode { file: PathBuf, c: usize },
    /// Generate a uniformly random automaton.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use the experiment's seed derivation for this trial index.
        #[arg(long)]
        trial: Option<u64>,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shortest reset word by breadth-first search over state subsets.
    Oracle {
        file: PathBuf,
        /// Largest number of states accepted.
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_LIMIT)]
        limit: usize,
    },
    /// Run trials over random automata and write statistics.
    Experiment {
        /// `paper`, `desk`, or a file of `n trials` lines.
        #[arg(long, default_value = "desk")]
        profile: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Smallest n used by the power-law fit.
        #[arg(long, default_value_t = DEFAULT_N_MIN)]
        n_min: usize,
        /// Also write per-trial wall-clock times to timings.csv.
        #[arg(long)]
        record_timings: bool,
        /// No progress lines on standard error.
        #[arg(long)]
        quiet: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Fit mean length against n from a summary.csv.
    Fit {
        summary: PathBuf,
        #[arg(long, default_value_t = DEFAULT_N_MIN)]
        n_min: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide a DIMACS formula, printing SAT-competition output.
    Solve {
        file: PathBuf,
        /// Conflict limit.
        #[arg(long, value_name = "CONFLICTS")]
        budget: Option<u64>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = dispatch(cli.command, out, err);
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Outcome {
    match command {
        Command::Check { file } => {
            let dfa = read_dfa(&file)?;
            let sync = dfa.is_synchronizing();
            writeln!(out, "synchronizing: {sync}")?;
            Ok(if sync { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Shortest { file, solver, json } => shortest(&file, &solver, json, out),
        Command::Encode { file, c } => {
            let dfa = read_dfa(&file)?;
            let (formula, _) = encode(&dfa, c).map_err(|e| Failure::input(e.to_string()))?;
            out.write_all(formula.to_dimacs().as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Gen {
            n,
            k,
            seed,
            trial,
            out: path,
        } => {
            if n == 0 || k == 0 {
                return Err(Failure::input("--n and --k must be at least 1"));
            }
            let dfa = match trial {
                Some(i) => trial_dfa(n, k, seed, i),
                None => random_dfa(n, k, seed),
            };
            let mut text = match trial {
                Some(i) => format!("# random automaton n={n} k={k} seed={seed} trial={i}\n"),
                None => format!("# random automaton n={n} k={k} seed={seed}\n"),
            };
            text.push_str(&dfa.to_string());
            match path {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { file, limit } => {
            let dfa = read_dfa(&file)?;
            match dfa.brute_force_shortest_with_limit(limit) {
                Ok(Some(w)) => {
                    writeln!(out, "length: {}", w.len())?;
                    writeln!(out, "word: {w}")?;
                    Ok(EXIT_OK)
                }
                Ok(None) => {
                    writeln!(out, "synchronizing: false")?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(Failure::input(e.to_string())),
            }
        }
        Command::Experiment {
            profile,
            seed,
            out_dir,
            jobs,
            n_min,
            record_timings,
            quiet,
            solver,
        } => experiment(
            &profile,
            seed,
            &out_dir,
            jobs,
            n_min,
            record_timings,
            quiet,
            &solver,
            out,
            err,
        ),
        Command::Fit {
            summary,
            n_min,
            json,
        } => fit(&summary, n_min, json, out),
        Command::Solve { file, budget } => {
            let text = read_text(&file)?;
            let formula = parse_dimacs(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
            let budget = Budget {
                conflicts: budget,
                time: None,
            };
            match Solver::new(&formula, SolverConfig::default()).solve(budget) {
                Ok(SolveResult::Sat(asg)) => {
                    writeln!(out, "s SATISFIABLE")?;
                    let mut line = String::from("v");
                    for lit in asg.to_dimacs_lits() {
                        line.push_str(&format!(" {lit}"));
                    }
                    writeln!(out, "{line} 0")?;
                    Ok(EXIT_OK)
                }
                Ok(SolveResult::Unsat) => {
                    writeln!(out, "s UNSATISFIABLE")?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(SolveError::BudgetExceeded { conflicts }) => {
                    writeln!(out, "s UNKNOWN")?;
                    writeln!(err, "budget exhausted after {conflicts} conflicts")?;
                    Ok(EXIT_BUDGET)
                }
                Err(e) => Err(Failure::input(e.to_string())),
            }
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_dfa(path: &Path) -> Result<Dfa, Failure> {
    read_text(path)?
        .parse()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ShortestJson {
    length: usize,
    word: String,
    initial_bound: usize,
    queries: Vec<QueryJson>,
}

#[derive(Serialize)]
struct QueryJson {
    length: usize,
    satisfiable: bool,
}

fn shortest(file: &Path, args: &SolverArgs, json: bool, out: &mut dyn Write) -> Outcome {
    let dfa = read_dfa(file)?;
    let backend = args.backend().map_err(Failure::input)?;
    let result = match shortest_reset_word(&dfa, backend.as_ref(), args.bound()) {
        Ok(r) => r,
        Err(ShortestError::NotSynchronizing) => {
            writeln!(out, "synchronizing: false")?;
            return Ok(EXIT_NEGATIVE);
        }
        Err(ShortestError::Solve(SolveError::BudgetExceeded { conflicts })) => {
            return Err(Failure {
                code: EXIT_BUDGET,
                message: format!("budget exhausted after {conflicts} conflicts"),
            })
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    };
    if json {
        let doc = ShortestJson {
            length: result.length,
            word: result.word.to_string(),
            initial_bound: result.initial_bound,
            queries: result
                .queries
                .iter()
                .map(|q| QueryJson {
                    length: q.length,
                    satisfiable: q.satisfiable,
                })
                .collect(),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("plain data"))?;
    } else {
        writeln!(out, "length: {}", result.length)?;
        writeln!(out, "word: {}", result.word)?;
        writeln!(out, "initial bound: {}", result.initial_bound)?;
        for q in &result.queries {
            let verdict = if q.satisfiable { "sat" } else { "unsat" };
            writeln!(out, "query {}: {verdict}", q.length)?;
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    profile: &str,
    seed: u64,
    out_dir: &Path,
    jobs: usize,
    n_min: usize,
    record_timings: bool,
    quiet: bool,
    args: &SolverArgs,
    out: &mut dyn Write,
    err: &mut (dyn Write + Send),
) -> Outcome {
    let profile = Profile::resolve(profile).map_err(|e| Failure::input(e.to_string()))?;
    let backend = args.backend().map_err(Failure::input)?;
    let config = RunConfig {
        master_seed: seed,
        budget: Budget {
            conflicts: args.budget,
            time: None,
        },
        jobs,
        bound: args.bound(),
    };
    let totals: BTreeMap<usize, u64> = profile.sizes.iter().copied().collect();
    let progress_state = Mutex::new((BTreeMap::<usize, u64>::new(), err));
    let progress = |r: &TrialRecord| {
        if quiet {
            return;
        }
        let mut guard = progress_state.lock().expect("progress lock");
        let (done, err) = &mut *guard;
        let count = done.entry(r.n).or_insert(0);
        *count += 1;
        if *count == totals[&r.n] {
            let _ = writeln!(err, "n={}: {} trials done", r.n, count);
        }
    };
    let records = run_trials_with(&profile, &config, backend.as_ref(), &progress)
        .map_err(|e| Failure::input(e.to_string()))?;
    let err = progress_state.into_inner().expect("progress lock").1;

    let summaries = summarize_all(&records);
    let points: Vec<(usize, f64)> = summaries
        .iter()
        .filter_map(|s| s.mean.map(|m| (s.n, m)))
        .collect();
    let fit = fit_power_law(&points, n_min);
    let metadata = RunMetadata {
        profile: profile.name.clone(),
        seed,
        budget_conflicts: args.budget,
        initial_bound: match args.bound() {
            InitialBound::Greedy => "greedy".into(),
            InitialBound::Cubic => "cubic".into(),
        },
        solver: args.describe(),
        version: env!("CARGO_PKG_VERSION").into(),
    };
    write_outputs(out_dir, &records, &summaries, fit.as_ref().ok(), &metadata, record_timings)
        .map_err(|e| Failure::input(e.to_string()))?;

    writeln!(out, "n trials sync_fraction mean variance ratio budget_exceeded")?;
    let cell = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    for s in &summaries {
        writeln!(
            out,
            "{} {} {:.4} {} {} {} {}",
            s.n,
            s.trials,
            s.sync_fraction,
            cell(s.mean),
            cell(s.variance),
            cell(s.ratio),
            s.budget_exceeded
        )?;
    }
    match &fit {
        Ok(f) => writeln!(
            out,
            "fit (n >= {}): mean ~ {:.4} * n^{:.4}",
            f.n_min, f.coefficient, f.slope
        )?,
        Err(e) => writeln!(out, "fit: {e}")?,
    }
    writeln!(out, "outputs: {}", out_dir.display())?;

    let exceeded: usize = summaries.iter().map(|s| s.budget_exceeded).sum();
    if exceeded > 0 {
        writeln!(err, "warning: {exceeded} trials ran out of budget and are excluded")?;
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}

#[derive(Deserialize)]
struct SummaryMean {
    n: usize,
    mean: Option<f64>,
}

fn fit(summary: &Path, n_min: usize, json: bool, out: &mut dyn Write) -> Outcome {
    let fail = |e: &dyn std::fmt::Display| Failure::input(format!("{}: {e}", summary.display()));
    let mut reader = csv::Reader::from_path(summary).map_err(|e| fail(&e))?;
    let mut points = Vec::new();
    for row in reader.deserialize::<SummaryMean>() {
        let row = row.map_err(|e| fail(&e))?;
        if let Some(m) = row.mean {
            points.push((row.n, m));
        }
    }
    let f = fit_power_law(&points, n_min).map_err(|e| fail(&e))?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&f).expect("plain data"))?;
    } else {
        writeln!(out, "slope: {:.6}", f.slope)?;
        writeln!(out, "intercept: {:.6}", f.intercept)?;
        writeln!(out, "coefficient: {:.6}", f.coefficient)?;
        writeln!(out, "n_min: {}", f.n_min)?;
        writeln!(out, "points: {}", f.points)?;
        writeln!(out, "rss: {:.6}", f.rss)?;
    }
    Ok(EXIT_OK)
}

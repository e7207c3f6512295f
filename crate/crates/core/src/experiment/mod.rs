//! Monte Carlo runs over random automata: trial execution, per-size
//! statistics, the power-law fit, and file output.

mod emit;
mod fit;
mod stats;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::random::{trial_dfa, trial_seed};
use crate::shortest::{shortest_reset_word, InitialBound, ShortestError};
use crate::solver::{Budget, InternalSolver, SatBackend, SolveError};

pub use emit::{read_trials_csv, write_outputs, EmitError, RunMetadata, OUTPUT_FILES};
pub use fit::{fit_power_law, FitError, FitResult, DEFAULT_N_MIN};
pub use stats::{summarize, summarize_all, SizeSummary, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialStatus {
    Ok,
    BudgetExceeded,
}

impl TrialStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrialStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(TrialStatus::Ok),
            "budget_exceeded" => Ok(TrialStatus::BudgetExceeded),
            other => Err(format!("unknown trial status `{other}`")),
        }
    }
}

/// Outcome of one random automaton. `length` is present iff the automaton
/// is synchronizing and the search finished within budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub n: usize,
    pub trial_index: u64,
    pub seed: u64,
    pub synchronizing: bool,
    pub length: Option<usize>,
    /// Wall-clock time of the whole trial. Not part of any deterministic output.
    pub solve_time: Duration,
    pub sat_queries: usize,
    pub status: TrialStatus,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("unknown profile `{0}` (expected paper, desk, or a file path)")]
    Unknown(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("profile has no sizes")]
    Empty,
}

/// Which sizes to run and how many trials each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub name: String,
    pub sizes: Vec<(usize, u64)>,
}

impl Profile {
    /// 2000 trials for n = 1..=20 and 25..=50 step 5, 500 for 55..=70,
    /// 200 for 75..=100.
    pub fn paper() -> Self {
        let mut sizes: Vec<(usize, u64)> = (1..=20).map(|n| (n, 2000)).collect();
        sizes.extend((25..=50).step_by(5).map(|n| (n, 2000)));
        sizes.extend((55..=70).step_by(5).map(|n| (n, 500)));
        sizes.extend((75..=100).step_by(5).map(|n| (n, 200)));
        Profile {
            name: "paper".into(),
            sizes,
        }
    }

    /// 200 trials at n = 5, 10 and 20..=50 step 5. Enough for the mean at
    /// 50, a fit over 20..=50, and the fraction and spread comparisons
    /// against the small sizes, in minutes on one core.
    pub fn desk() -> Self {
        let mut sizes = vec![(5, 200), (10, 200)];
        sizes.extend((20..=50).step_by(5).map(|n| (n, 200)));
        Profile {
            name: "desk".into(),
            sizes,
        }
    }

    pub fn custom(name: impl Into<String>, sizes: Vec<(usize, u64)>) -> Result<Self, ProfileError> {
        if sizes.is_empty() {
            return Err(ProfileError::Empty);
        }
        Ok(Profile {
            name: name.into(),
            sizes,
        })
    }

    /// `paper`, `desk`, or the path of a profile file.
    pub fn resolve(name: &str) -> Result<Self, ProfileError> {
        match name {
            "paper" => Ok(Profile::paper()),
            "desk" => Ok(Profile::desk()),
            path if Path::new(path).is_file() => {
                let text = std::fs::read_to_string(path).map_err(|source| ProfileError::Io {
                    path: path.to_string(),
                    source,
                })?;
                let sizes = Profile::parse_sizes(&text)?;
                Profile::custom(path, sizes)
            }
            other => Err(ProfileError::Unknown(other.to_string())),
        }
    }

    /// One `n trials` pair per line, separated by whitespace or a comma.
    /// `#` starts a comment. Each `n` may appear once.
    pub fn parse_sizes(text: &str) -> Result<Vec<(usize, u64)>, ProfileError> {
        let mut sizes: Vec<(usize, u64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ProfileError::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let [n, trials] = fields[..] else {
                return Err(err(format!("expected `n trials`, got `{content}`")));
            };
            let n: usize = n.parse().map_err(|_| err(format!("bad size `{n}`")))?;
            let trials: u64 = trials
                .parse()
                .map_err(|_| err(format!("bad trial count `{trials}`")))?;
            if n == 0 {
                return Err(err("size must be at least 1".into()));
            }
            if trials == 0 {
                return Err(err("trial count must be at least 1".into()));
            }
            if sizes.iter().any(|&(m, _)| m == n) {
                return Err(err(format!("size {n} listed twice")));
            }
            sizes.push((n, trials));
        }
        if sizes.is_empty() {
            return Err(ProfileError::Empty);
        }
        Ok(sizes)
    }

    pub fn total_trials(&self) -> u64 {
        self.sizes.iter().map(|&(_, t)| t).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub master_seed: u64,
    /// Applied to every SAT query of every trial.
    pub budget: Budget,
    /// Worker threads; 0 lets the pool pick.
    pub jobs: usize,
    pub bound: InitialBound,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            master_seed: 1,
            budget: Budget::unlimited(),
            jobs: 1,
            bound: InitialBound::Greedy,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("trial {trial_index} at n={n}: {source}")]
    Trial {
        n: usize,
        trial_index: u64,
        #[source]
        source: ShortestError,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Runs one trial. Budget exhaustion is an outcome, every other solver
/// failure is an error.
pub fn run_trial(
    n: usize,
    trial_index: u64,
    master_seed: u64,
    backend: &dyn SatBackend,
    bound: InitialBound,
) -> Result<TrialRecord, ExperimentError> {
    let started = Instant::now();
    let dfa = trial_dfa(n, 2, master_seed, trial_index);
    let mut record = TrialRecord {
        n,
        trial_index,
        seed: trial_seed(master_seed, n, trial_index),
        synchronizing: dfa.is_synchronizing(),
        length: None,
        solve_time: Duration::ZERO,
        sat_queries: 0,
        status: TrialStatus::Ok,
    };
    if record.synchronizing {
        match shortest_reset_word(&dfa, backend, bound) {
            Ok(result) => {
                record.length = Some(result.length);
                record.sat_queries = result.queries.len();
            }
            Err(ShortestError::Solve(SolveError::BudgetExceeded { .. })) => {
                record.status = TrialStatus::BudgetExceeded;
            }
            Err(source) => {
                return Err(ExperimentError::Trial {
                    n,
                    trial_index,
                    source,
                })
            }
        }
    }
    record.solve_time = started.elapsed();
    Ok(record)
}

/// Runs every trial of `profile` with the built-in solver.
pub fn run_trials(profile: &Profile, config: &RunConfig) -> Result<Vec<TrialRecord>, ExperimentError> {
    let backend = InternalSolver::with_budget(config.budget);
    run_trials_with(profile, config, &backend, &|_| {})
}

/// Runs every trial of `profile` on `config.jobs` threads and returns the
/// records ordered by `(n, trial_index)`. `progress` sees each record as it
/// completes, in no particular order. `config.budget` is not applied here;
/// it belongs to the backend.
pub fn run_trials_with(
    profile: &Profile,
    config: &RunConfig,
    backend: &dyn SatBackend,
    progress: &(dyn Fn(&TrialRecord) + Sync),
) -> Result<Vec<TrialRecord>, ExperimentError> {
    let tasks: Vec<(usize, u64)> = profile
        .sizes
        .iter()
        .flat_map(|&(n, count)| (0..count).map(move |i| (n, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let mut records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, i)| {
                let record = run_trial(n, i, config.master_seed, backend, config.bound)?;
                progress(&record);
                Ok(record)
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    records.sort_by_key(|r| (r.n, r.trial_index));
    Ok(records)
}

//! Output files. Everything except `timings.csv` is a pure function of the
//! records, so reruns with the same seed produce identical bytes.
//!
//! `trials.csv` columns: `n,trial_index,seed,synchronizing,length,sat_queries,status`.
//! `length` is empty when absent. `summary.csv` columns:
//! `n,trials,sync_count,sync_fraction,budget_exceeded,samples,mean,variance,ratio`,
//! with empty cells for statistics that lack data. Floats use six decimals.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FitResult, SizeSummary, TrialRecord, TrialStatus};

/// Files whose contents depend only on the records and metadata.
pub const OUTPUT_FILES: [&str; 8] = [
    "trials.csv",
    "summary.csv",
    "histogram.csv",
    "fit.json",
    "fig2_histogram.dat",
    "fig3_loglog.dat",
    "fig4_mean.dat",
    "fig5_ratio.dat",
];

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: row {row}: {message}")]
    Invalid {
        path: PathBuf,
        row: usize,
        message: String,
    },
}

/// Run parameters recorded next to the fit. Nothing here may depend on
/// scheduling, so the thread count is deliberately absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunMetadata {
    pub profile: String,
    pub seed: u64,
    pub budget_conflicts: Option<u64>,
    pub initial_bound: String,
    pub solver: String,
    pub version: String,
}

#[derive(Serialize, Deserialize)]
struct TrialRow {
    n: usize,
    trial_index: u64,
    seed: u64,
    synchronizing: bool,
    length: Option<usize>,
    sat_queries: usize,
    status: String,
}

#[derive(Serialize)]
struct SummaryRow {
    n: usize,
    trials: usize,
    sync_count: usize,
    sync_fraction: String,
    budget_exceeded: usize,
    samples: usize,
    mean: String,
    variance: String,
    ratio: String,
}

#[derive(Serialize)]
struct HistogramRow {
    n: usize,
    length: usize,
    count: usize,
    probability: String,
}

#[derive(Serialize)]
struct FitJson<'a> {
    metadata: &'a RunMetadata,
    budget_exceeded: usize,
    fit: Option<FitResult>,
}

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

fn opt_fixed(x: Option<f64>) -> String {
    x.map(fixed).unwrap_or_default()
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn csv_bytes<T: Serialize>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> Result<Vec<u8>, EmitError> {
    let err = |source| EmitError::Csv {
        path: path.to_path_buf(),
        source,
    };
    // Headers are written by hand so an empty table still has them.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| EmitError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), EmitError> {
    fs::write(path, bytes).map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes every output file into `dir`, creating it if needed, and returns
/// the paths written.
pub fn write_outputs(
    dir: &Path,
    records: &[TrialRecord],
    summaries: &[SizeSummary],
    fit: Option<&FitResult>,
    metadata: &RunMetadata,
    with_timings: bool,
) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let path = |name: &str| dir.join(name);

    let p = path("trials.csv");
    let rows = records.iter().map(|r| TrialRow {
        n: r.n,
        trial_index: r.trial_index,
        seed: r.seed,
        synchronizing: r.synchronizing,
        length: r.length,
        sat_queries: r.sat_queries,
        status: r.status.to_string(),
    });
    let header = ["n", "trial_index", "seed", "synchronizing", "length", "sat_queries", "status"];
    files.push((p.clone(), csv_bytes(&p, &header, rows)?));

    let p = path("summary.csv");
    let rows = summaries.iter().map(|s| SummaryRow {
        n: s.n,
        trials: s.trials,
        sync_count: s.sync_count,
        sync_fraction: fixed(s.sync_fraction),
        budget_exceeded: s.budget_exceeded,
        samples: s.samples,
        mean: opt_fixed(s.mean),
        variance: opt_fixed(s.variance),
        ratio: opt_fixed(s.ratio),
    });
    let header = [
        "n",
        "trials",
        "sync_count",
        "sync_fraction",
        "budget_exceeded",
        "samples",
        "mean",
        "variance",
        "ratio",
    ];
    files.push((p.clone(), csv_bytes(&p, &header, rows)?));

    let p = path("histogram.csv");
    let rows = summaries.iter().flat_map(|s| {
        s.histogram.iter().map(move |(&length, &count)| HistogramRow {
            n: s.n,
            length,
            count,
            probability: fixed(count as f64 / s.samples as f64),
        })
    });
    files.push((p.clone(), csv_bytes(&p, &["n", "length", "count", "probability"], rows)?));

    let p = path("fit.json");
    let doc = FitJson {
        metadata,
        budget_exceeded: summaries.iter().map(|s| s.budget_exceeded).sum(),
        fit: fit.map(|f| FitResult {
            slope: round6(f.slope),
            intercept: round6(f.intercept),
            coefficient: round6(f.coefficient),
            rss: round6(f.rss),
            ..*f
        }),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    json.push('\n');
    files.push((p, json.into_bytes()));

    let mut dat = String::new();
    if let Some(s) = summaries.iter().rev().find(|s| s.samples > 0) {
        writeln!(dat, "# distribution of the shortest reset length at n={}", s.n).unwrap();
        writeln!(dat, "# length probability").unwrap();
        for (&length, &count) in &s.histogram {
            writeln!(dat, "{length} {}", fixed(count as f64 / s.samples as f64)).unwrap();
        }
    } else {
        writeln!(dat, "# length probability").unwrap();
    }
    files.push((path("fig2_histogram.dat"), dat.into_bytes()));

    let mut dat = String::from("# ln_n ln_mean\n");
    for s in summaries {
        if let Some(m) = s.mean.filter(|&m| m > 0.0) {
            writeln!(dat, "{} {}", fixed((s.n as f64).ln()), fixed(m.ln())).unwrap();
        }
    }
    files.push((path("fig3_loglog.dat"), dat.into_bytes()));

    let mut dat = String::from(if fit.is_some() { "# n mean fitted\n" } else { "# n mean\n" });
    for s in summaries {
        if let Some(m) = s.mean {
            write!(dat, "{} {}", s.n, fixed(m)).unwrap();
            if let Some(f) = fit {
                write!(dat, " {}", fixed(f.predict(s.n as f64))).unwrap();
            }
            dat.push('\n');
        }
    }
    files.push((path("fig4_mean.dat"), dat.into_bytes()));

    let mut dat = String::from("# n sqrt_variance_over_mean\n");
    for s in summaries {
        if let Some(r) = s.ratio {
            writeln!(dat, "{} {}", s.n, fixed(r)).unwrap();
        }
    }
    files.push((path("fig5_ratio.dat"), dat.into_bytes()));

    if with_timings {
        let mut text = String::from("n,trial_index,solve_time_s\n");
        for r in records {
            writeln!(text, "{},{},{}", r.n, r.trial_index, fixed(r.solve_time.as_secs_f64())).unwrap();
        }
        files.push((path("timings.csv"), text.into_bytes()));
    }

    for (p, bytes) in &files {
        write_file(p, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

/// Reads `trials.csv` back. Solve times are not stored there and come back
/// as zero.
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>, EmitError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| EmitError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<TrialRow>().enumerate() {
        let row = row.map_err(|source| EmitError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let invalid = |message: String| EmitError::Invalid {
            path: path.to_path_buf(),
            row: i + 1,
            message,
        };
        let status: TrialStatus = row.status.parse().map_err(invalid)?;
        let consistent = row.length.is_some() == (row.synchronizing && status == TrialStatus::Ok);
        if !consistent {
            return Err(invalid("length must be present iff synchronizing and ok".into()));
        }
        records.push(TrialRecord {
            n: row.n,
            trial_index: row.trial_index,
            seed: row.seed,
            synchronizing: row.synchronizing,
            length: row.length,
            solve_time: Duration::ZERO,
            sat_queries: row.sat_queries,
            status,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{fit_power_law, summarize_all};

    fn meta() -> RunMetadata {
        RunMetadata {
            profile: "test".into(),
            seed: 1,
            budget_conflicts: None,
            initial_bound: "greedy".into(),
            solver: "internal".into(),
            version: "0".into(),
        }
    }

    fn rec(n: usize, i: u64, length: Option<usize>) -> TrialRecord {
        TrialRecord {
            n,
            trial_index: i,
            seed: 100 + i,
            synchronizing: length.is_some(),
            length,
            solve_time: Duration::from_millis(3),
            sat_queries: 2,
            status: TrialStatus::Ok,
        }
    }

    #[test]
    fn empty_records_give_headers() {
        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &[], &[], None, &meta(), false).unwrap();
        let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(
            read("trials.csv"),
            "n,trial_index,seed,synchronizing,length,sat_queries,status\n"
        );
        assert_eq!(
            read("summary.csv"),
            "n,trials,sync_count,sync_fraction,budget_exceeded,samples,mean,variance,ratio\n"
        );
        assert_eq!(read("histogram.csv"), "n,length,count,probability\n");
        assert!(read("fit.json").contains("\"fit\": null"));
        assert!(!dir.path().join("timings.csv").exists());
    }

    #[test]
    fn single_state_summary_row() {
        let records: Vec<_> = (0..3).map(|i| rec(1, i, Some(0))).collect();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &records, &summarize_all(&records), None, &meta(), true).unwrap();
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().nth(1), Some("1,3,3,1.000000,0,3,0.000000,0.000000,"));
        let trials = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
        assert_eq!(trials.lines().nth(1), Some("1,0,100,true,0,2,ok"));
        let timings = fs::read_to_string(dir.path().join("timings.csv")).unwrap();
        assert_eq!(timings.lines().nth(1), Some("1,0,0.003000"));
    }

    #[test]
    fn trials_round_trip() {
        let mut records = vec![rec(20, 0, Some(9)), rec(20, 1, None), rec(30, 0, Some(12))];
        records.push(TrialRecord {
            synchronizing: true,
            status: TrialStatus::BudgetExceeded,
            ..rec(30, 1, None)
        });
        let summaries = summarize_all(&records);
        let points: Vec<_> = summaries.iter().map(|s| (s.n, s.mean.unwrap())).collect();
        let fit = fit_power_law(&points, 20).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &records, &summaries, Some(&fit), &meta(), false).unwrap();

        let back = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
        let zeroed: Vec<_> = records
            .iter()
            .map(|r| TrialRecord {
                solve_time: Duration::ZERO,
                ..r.clone()
            })
            .collect();
        assert_eq!(back, zeroed);
        assert_eq!(summarize_all(&back), summaries);

        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
        assert_eq!(json["budget_exceeded"], 1);
        assert_eq!(json["metadata"]["profile"], "test");
        assert_eq!(json["fit"]["points"], 2);
        let fig4 = fs::read_to_string(dir.path().join("fig4_mean.dat")).unwrap();
        assert_eq!(fig4.lines().count(), 3);
        assert!(fig4.starts_with("# n mean fitted\n20 9.000000 9.000000\n"));
    }

    #[test]
    fn inconsistent_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("trials.csv");
        fs::write(
            &p,
            "n,trial_index,seed,synchronizing,length,sat_queries,status\n5,0,1,false,3,0,ok\n",
        )
        .unwrap();
        assert!(matches!(read_trials_csv(&p), Err(EmitError::Invalid { row: 1, .. })));
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "").unwrap();
        let err = write_outputs(&blocker.join("sub"), &[], &[], None, &meta(), false).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}

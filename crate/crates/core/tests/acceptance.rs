//! Acceptance checks, one line per criterion. Criteria 4 to 7 read the
//! trials written by the determinism runs of criterion 9 back from CSV, so
//! the desk profile is run exactly twice.
//!
//! Set `SYNCHRO_EXTENDED=1` to include the hours-long n = 100 check.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use synchro::encoding::encode;
use synchro::experiment::{
    fit_power_law, read_trials_csv, run_trials, summarize_all, Profile, RunConfig, SizeSummary,
    OUTPUT_FILES,
};
use synchro::random::{random_dfa, trial_dfa, SplitMix64};
use synchro::solver::{check_model, InternalSolver, SatBackend, SolveResult};
use synchro::{shortest_reset_word, Dfa, InitialBound};

const BIN: &str = env!("CARGO_BIN_EXE_synchro");

type Check = Result<String, String>;

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn oracle_equivalence() -> Check {
    let solver = InternalSolver::default();
    let mut checked = 0;
    for n in 2..=8 {
        let mut found = 0;
        let mut i = 0;
        while found < 50 {
            let dfa = trial_dfa(n, 2, 2718, i);
            i += 1;
            let Some(exact) = dfa.brute_force_shortest().map_err(|e| e.to_string())? else {
                continue;
            };
            let r = shortest_reset_word(&dfa, &solver, InitialBound::Greedy)
                .map_err(|e| format!("n={n} trial {}: {e}", i - 1))?;
            ensure(
                r.length == exact.len() && dfa.verify_reset_word(&r.word),
                format!("n={n} trial {}: SAT length {} vs subset search {}", i - 1, r.length, exact.len()),
            )?;
            found += 1;
            checked += 1;
        }
    }
    Ok(format!("{checked} synchronizing automata with n in 2..=8 agree"))
}

fn count_formulas() -> Check {
    let mut rng = SplitMix64::new(31337);
    for _ in 0..100 {
        let n = 1 + rng.below(30) as usize;
        let c = rng.below(41) as usize;
        let dfa = random_dfa(n, 2, rng.next_u64());
        let (f, _) = encode(&dfa, c).map_err(|e| e.to_string())?;
        let got = (f.num_vars() as usize, f.num_clauses(), f.num_literals());
        let want = ((c + 1) * n + c, n * (n - 1) / 2 + n * (2 * c + 1), n * n + 6 * c * n);
        ensure(got == want, format!("n={n} c={c}: got {got:?}, want {want:?}"))?;
    }
    Ok("100 random (n, c) pairs match all three counts".into())
}

fn cerny_fixture() -> Check {
    let solver = InternalSolver::default();
    for n in 3..=6 {
        let dfa = Dfa::cerny(n);
        let want = (n - 1) * (n - 1);
        let oracle = dfa
            .brute_force_shortest()
            .map_err(|e| e.to_string())?
            .ok_or("subset search found no reset word")?;
        let r = shortest_reset_word(&dfa, &solver, InitialBound::Greedy).map_err(|e| e.to_string())?;
        ensure(
            r.length == want && oracle.len() == want,
            format!("C{n}: SAT {} and subset search {}, want {want}", r.length, oracle.len()),
        )?;
    }
    Ok("C3..C6 give 4, 9, 16, 25 by SAT and by subset search".into())
}

fn solver_soundness() -> Check {
    let mut rng = SplitMix64::new(8);
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..1000 {
        let f = common::random_formula(&mut rng, 20);
        let expected = common::enumerate_sat(&f);
        let verdict = InternalSolver::default().solve(&f).map_err(|e| e.to_string())?;
        ensure(verdict.is_sat() == expected, format!("formula {i}: verdict disagrees with enumeration"))?;
        if let SolveResult::Sat(asg) = &verdict {
            ensure(check_model(&f, asg), format!("formula {i}: model fails check"))?;
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    Ok(format!("1000 formulas ({sat} SAT, {unsat} UNSAT) agree with enumeration"))
}

fn run_desk(out: &Path, jobs: &str) -> Result<(), String> {
    let started = Instant::now();
    let o = Command::new(BIN)
        .args(["experiment", "--profile", "desk", "--seed", "1", "--jobs", jobs, "--quiet", "--out-dir"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    eprintln!("desk run with --jobs {jobs}: {:.0}s", started.elapsed().as_secs_f64());
    ensure(
        o.status.success(),
        format!("desk run with --jobs {jobs} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)),
    )
}

fn determinism(one: &Path, eight: &Path) -> Check {
    run_desk(one, "1")?;
    run_desk(eight, "8")?;
    let listing = |d: &Path| -> Vec<String> {
        let mut names: Vec<String> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    };
    ensure(listing(one) == listing(eight), "runs wrote different file sets".into())?;
    for name in OUTPUT_FILES {
        let a = fs::read(one.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let b = fs::read(eight.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(a == b, format!("{name} differs between --jobs 1 and --jobs 8"))?;
    }
    Ok(format!("{} output files byte-identical for --jobs 1 and --jobs 8", OUTPUT_FILES.len()))
}

fn desk_summaries(dir: &Path) -> Result<BTreeMap<usize, SizeSummary>, String> {
    let records = read_trials_csv(&dir.join("trials.csv")).map_err(|e| e.to_string())?;
    let summaries: BTreeMap<usize, SizeSummary> =
        summarize_all(&records).into_iter().map(|s| (s.n, s)).collect();
    let exceeded: usize = summaries.values().map(|s| s.budget_exceeded).sum();
    ensure(exceeded == 0, format!("{exceeded} trials ran out of budget"))?;
    Ok(summaries)
}

fn size<'a>(s: &'a BTreeMap<usize, SizeSummary>, n: usize) -> Result<&'a SizeSummary, String> {
    let summary = s.get(&n).ok_or(format!("desk run has no n={n}"))?;
    ensure(summary.trials >= 200, format!("only {} trials at n={n}", summary.trials))?;
    Ok(summary)
}

fn mean_at_50(s: &BTreeMap<usize, SizeSummary>) -> Check {
    let m = size(s, 50)?.mean().map_err(|e| e.to_string())?;
    let target = 1.95 * 50f64.powf(0.55);
    let within = (m - target).abs() <= 0.10 * target;
    let msg = format!("mean at n=50 is {m:.3}, target {target:.2} +/- 10%");
    ensure(within, msg.clone())?;
    Ok(msg)
}

fn power_law(s: &BTreeMap<usize, SizeSummary>) -> Check {
    let mut points = Vec::new();
    for n in (20..=50).step_by(5) {
        points.push((n, size(s, n)?.mean().map_err(|e| e.to_string())?));
    }
    let fit = fit_power_law(&points, 20).map_err(|e| e.to_string())?;
    let msg = format!(
        "slope {:.4} over n=20..50 (coefficient {:.3}), want [0.50, 0.60]",
        fit.slope, fit.coefficient
    );
    ensure((0.50..=0.60).contains(&fit.slope), msg.clone())?;
    Ok(msg)
}

fn sync_fraction(s: &BTreeMap<usize, SizeSummary>) -> Check {
    let f = size(s, 50)?.sync_fraction;
    let msg = format!("fraction at n=50 is {f:.3}, want >= 0.90");
    ensure(f >= 0.90, msg.clone())?;
    Ok(msg)
}

fn sync_fraction_extended() -> Check {
    let profile = Profile::custom("n100", vec![(100, 100)]).map_err(|e| e.to_string())?;
    let config = RunConfig {
        master_seed: 1,
        ..RunConfig::default()
    };
    let records = run_trials(&profile, &config).map_err(|e| e.to_string())?;
    let s = &summarize_all(&records)[0];
    let msg = format!("fraction at n=100 is {:.3}, want >= 0.95", s.sync_fraction);
    ensure(s.sync_fraction >= 0.95, msg.clone())?;
    Ok(msg)
}

fn concentration(s: &BTreeMap<usize, SizeSummary>) -> Check {
    let r10 = size(s, 10)?.ratio().map_err(|e| e.to_string())?;
    let r50 = size(s, 50)?.ratio().map_err(|e| e.to_string())?;
    let msg = format!("sqrt(d)/r is {r50:.4} at n=50 and {r10:.4} at n=10");
    ensure(r50 < r10, msg.clone())?;
    Ok(msg)
}

fn desk_trends(s: &BTreeMap<usize, SizeSummary>) -> Check {
    let (f5, f50) = (size(s, 5)?.sync_fraction, size(s, 50)?.sync_fraction);
    ensure(f50 > f5, format!("fraction at n=50 ({f50:.3}) not above n=5 ({f5:.3})"))?;
    let mut means = Vec::new();
    for n in [10, 20, 30, 40, 50] {
        means.push(size(s, n)?.mean().map_err(|e| e.to_string())?);
    }
    ensure(
        means.windows(2).all(|w| w[0] < w[1]),
        format!("means at n=10,20,30,40,50 not increasing: {means:?}"),
    )?;
    Ok(format!("fraction {f5:.3} -> {f50:.3} from n=5 to 50; means increase over 10..50"))
}

fn guarded(f: impl FnOnce() -> Check) -> Check {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    // The test runner may probe with `--list`; there is nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let mut results: Vec<(&str, &str, Check)> = Vec::new();
    results.push(("1", "oracle equivalence", guarded(oracle_equivalence)));
    results.push(("2", "encoding counts", guarded(count_formulas)));
    results.push(("3", "Cerny fixture", guarded(cerny_fixture)));
    results.push(("8", "solver soundness", guarded(solver_soundness)));

    let dir = tempfile::tempdir().expect("temporary directory");
    let (one, eight) = (dir.path().join("jobs1"), dir.path().join("jobs8"));
    let det = guarded(|| determinism(&one, &eight));
    let desk = if eight.join("trials.csv").exists() {
        desk_summaries(&eight)
    } else {
        Err("desk run did not complete".to_string())
    };
    let on_desk = |f: fn(&BTreeMap<usize, SizeSummary>) -> Check| match &desk {
        Ok(s) => guarded(|| f(s)),
        Err(e) => Err(e.clone()),
    };
    results.push(("4", "mean length at n=50", on_desk(mean_at_50)));
    results.push(("5", "power-law exponent", on_desk(power_law)));
    results.push(("6", "synchronizing fraction", on_desk(sync_fraction)));
    let extended = if std::env::var_os("SYNCHRO_EXTENDED").is_some() {
        Some(guarded(sync_fraction_extended))
    } else {
        None
    };
    results.push(("7", "concentration trend", on_desk(concentration)));
    results.push(("9", "determinism", det));
    results.push(("-", "desk trends", on_desk(desk_trends)));

    results.sort_by_key(|(id, _, _)| if *id == "-" { 99 } else { id.parse::<u32>().unwrap() });
    let mut failed = 0;
    for (id, name, result) in &results {
        let label = if *id == "-" { name.to_string() } else { format!("criterion {id} ({name})") };
        match result {
            Ok(detail) => println!("{label}: PASS: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{label}: FAIL: {detail}");
            }
        }
        if *id == "6" {
            match &extended {
                Some(Ok(detail)) => println!("criterion 6 extended (n=100): PASS: {detail}"),
                Some(Err(detail)) => {
                    failed += 1;
                    println!("criterion 6 extended (n=100): FAIL: {detail}");
                }
                None => println!("criterion 6 extended (n=100): SKIPPED: set SYNCHRO_EXTENDED=1"),
            }
        }
    }
    println!(
        "acceptance: {} checks, {failed} failed, {:.0}s",
        results.len() + usize::from(extended.is_some()),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

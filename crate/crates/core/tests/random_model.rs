use synchro::random::{random_dfa, trial_dfa, trial_seed, SplitMix64};

// Reference values from an independent implementation of the documented
// generator, so a port in any language can check itself against these.
#[test]
fn golden_seeds() {
    assert_eq!(trial_seed(1, 10, 0), 0x86c42a5448c29549);
    assert_eq!(trial_seed(1, 50, 199), 0x817caf4a0c5e2acf);
    assert_eq!(trial_seed(0, 1, 0), 0x7ab40e090f363a7d);
}

#[test]
fn golden_automata() {
    assert_eq!(random_dfa(5, 2, 7).table(), &[2, 4, 1, 3, 4, 0, 3, 2, 0, 0]);
    assert_eq!(
        trial_dfa(10, 2, 1, 3).table(),
        &[1, 1, 7, 8, 7, 3, 5, 8, 0, 9, 3, 7, 4, 5, 9, 1, 5, 9, 8, 7]
    );
    assert_eq!(
        random_dfa(7, 3, 12345).table(),
        &[5, 3, 5, 4, 3, 6, 2, 2, 6, 0, 1, 5, 0, 5, 2, 2, 4, 0, 2, 0, 3]
    );
}

#[test]
fn round_trips_through_text() {
    for i in 0..20 {
        let dfa = trial_dfa(12, 2, 9, i);
        assert_eq!(dfa.to_string().parse::<synchro::Dfa>().unwrap(), dfa);
    }
}

/// n = 3, k = 2: six transition cells, each with three possible targets.
/// Every one of the 18 (cell, target) frequencies must be within 3σ of 1/3,
/// and the pooled chi-square statistic (12 degrees of freedom) must stay
/// below its 0.1% critical value.
#[test]
fn transition_targets_are_uniform() {
    const SAMPLES: usize = 60_000;
    let mut counts = [[0usize; 3]; 6];
    for i in 0..SAMPLES {
        let dfa = trial_dfa(3, 2, 2024, i as u64);
        for (cell, &target) in dfa.table().iter().enumerate() {
            counts[cell][target] += 1;
        }
    }
    let p = 1.0 / 3.0;
    let sigma = (p * (1.0 - p) / SAMPLES as f64).sqrt();
    let expected = SAMPLES as f64 * p;
    let mut chi2 = 0.0;
    for row in &counts {
        assert_eq!(row.iter().sum::<usize>(), SAMPLES);
        for &c in row {
            let freq = c as f64 / SAMPLES as f64;
            assert!((freq - p).abs() < 3.0 * sigma, "frequency {freq} in {counts:?}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
    }
    assert!(chi2 < 32.909, "chi-square {chi2}");
}

#[test]
fn below_spreads_evenly() {
    let mut rng = SplitMix64::new(5);
    let mut counts = [0usize; 3];
    for _ in 0..30_000 {
        counts[rng.below(3) as usize] += 1;
    }
    for c in counts {
        assert!((9_700..10_300).contains(&c), "{counts:?}");
    }
}

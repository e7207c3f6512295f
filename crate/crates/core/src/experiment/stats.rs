use std::collections::BTreeMap;

use thiserror::Error;

use super::{TrialRecord, TrialStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no records to summarize")]
    Empty,
    #[error("records mix sizes {0} and {1}")]
    MixedSizes(usize, usize),
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
}

/// Statistics of ℓ for one size. Non-synchronizing trials count toward
/// the fraction only; budget-exceeded trials are counted separately and
/// contribute no sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub trials: usize,
    pub sync_count: usize,
    pub sync_fraction: f64,
    pub budget_exceeded: usize,
    /// Number of lengths behind the statistics.
    pub samples: usize,
    pub mean: Option<f64>,
    /// Bessel-corrected; needs two samples.
    pub variance: Option<f64>,
    /// `√variance / mean`; absent when the mean is zero.
    pub ratio: Option<f64>,
    /// Length → count, over the samples.
    pub histogram: BTreeMap<usize, usize>,
}

impl SizeSummary {
    pub fn mean(&self) -> Result<f64, StatsError> {
        self.mean
            .ok_or(StatsError::InsufficientData("mean needs one synchronizing sample"))
    }

    pub fn variance(&self) -> Result<f64, StatsError> {
        self.variance
            .ok_or(StatsError::InsufficientData("variance needs two synchronizing samples"))
    }

    pub fn ratio(&self) -> Result<f64, StatsError> {
        self.ratio.ok_or(StatsError::InsufficientData(
            "ratio needs two samples and a positive mean",
        ))
    }
}

/// Summarizes the records of a single size.
pub fn summarize(records: &[TrialRecord]) -> Result<SizeSummary, StatsError> {
    let first = records.first().ok_or(StatsError::Empty)?;
    if let Some(other) = records.iter().find(|r| r.n != first.n) {
        return Err(StatsError::MixedSizes(first.n, other.n));
    }
    let sync_count = records.iter().filter(|r| r.synchronizing).count();
    let budget_exceeded = records
        .iter()
        .filter(|r| r.status == TrialStatus::BudgetExceeded)
        .count();
    let lengths: Vec<usize> = records.iter().filter_map(|r| r.length).collect();

    let mut histogram = BTreeMap::new();
    for &l in &lengths {
        *histogram.entry(l).or_insert(0) += 1;
    }
    let count = lengths.len() as f64;
    let mean = (!lengths.is_empty()).then(|| lengths.iter().sum::<usize>() as f64 / count);
    let variance = match mean {
        Some(m) if lengths.len() >= 2 => Some(
            lengths
                .iter()
                .map(|&l| (l as f64 - m).powi(2))
                .sum::<f64>()
                / (count - 1.0),
        ),
        _ => None,
    };
    let ratio = match (mean, variance) {
        (Some(m), Some(v)) if m > 0.0 => Some(v.sqrt() / m),
        _ => None,
    };
    Ok(SizeSummary {
        n: first.n,
        trials: records.len(),
        sync_count,
        sync_fraction: sync_count as f64 / records.len() as f64,
        budget_exceeded,
        samples: lengths.len(),
        mean,
        variance,
        ratio,
        histogram,
    })
}

/// One summary per distinct size, in increasing `n`.
pub fn summarize_all(records: &[TrialRecord]) -> Vec<SizeSummary> {
    let mut by_size: BTreeMap<usize, Vec<TrialRecord>> = BTreeMap::new();
    for r in records {
        by_size.entry(r.n).or_default().push(r.clone());
    }
    by_size
        .values()
        .map(|group| summarize(group).expect("non-empty group of one size"))
        .collect()
}

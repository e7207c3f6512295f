use serde::Serialize;
use thiserror::Error;

/// Sizes below this are left out of the fit by default.
pub const DEFAULT_N_MIN: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least two distinct sizes with n >= {n_min}, found {found}")]
    InsufficientPoints { n_min: usize, found: usize },
    #[error("mean at n={n} is {mean}, which has no logarithm")]
    NonPositive { n: usize, mean: f64 },
}

/// `ln r ≈ slope · ln n + intercept`, i.e. `r ≈ coefficient · n^slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub coefficient: f64,
    pub n_min: usize,
    pub points: usize,
    /// Residual sum of squares in log space.
    pub rss: f64,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        self.coefficient * n.powf(self.slope)
    }
}

/// Ordinary least squares of `ln r` on `ln n` over the points with
/// `n ≥ n_min`. The input order does not matter.
pub fn fit_power_law(points: &[(usize, f64)], n_min: usize) -> Result<FitResult, FitError> {
    let mut used: Vec<(usize, f64)> = points.iter().copied().filter(|&(n, _)| n >= n_min).collect();
    // Summation order fixed so reordered input gives identical bits.
    used.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if let Some(&(n, mean)) = used.iter().find(|&&(_, r)| !(r > 0.0 && r.is_finite())) {
        return Err(FitError::NonPositive { n, mean });
    }
    let distinct = used.windows(2).filter(|w| w[0].0 != w[1].0).count() + usize::from(!used.is_empty());
    if distinct < 2 {
        return Err(FitError::InsufficientPoints {
            n_min,
            found: distinct,
        });
    }

    let xy: Vec<(f64, f64)> = used.iter().map(|&(n, r)| ((n as f64).ln(), r.ln())).collect();
    let m = xy.len() as f64;
    let mean_x = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss = xy
        .iter()
        .map(|&(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        coefficient: intercept.exp(),
        n_min,
        points: used.len(),
        rss,
    })
}

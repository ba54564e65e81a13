//! Correlation metrics and batch summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pearson correlation of two equal-length, non-constant series.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("series of length {} and {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: a.len() });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if !(saa > 0.0 && sbb > 0.0) {
        return Err(Error::ZeroVariance("correlation with a constant series".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelation {
    /// `(lag, rho)` for every lag whose overlap was non-constant.
    pub by_lag: Vec<(i64, f64)>,
    pub best_lag: i64,
    pub best_rho: f64,
}

/// Pearson correlation of `a(t)` with `b(t + lag)` for lags in `[-max_lag, max_lag]`.
///
/// A positive lag means `b` trails `a`. Lags whose overlap is constant are skipped.
pub fn cross_correlation(a: &[f64], b: &[f64], max_lag: usize) -> Result<CrossCorrelation> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("series of length {} and {}", a.len(), b.len())));
    }
    if 2 * max_lag >= a.len() {
        return Err(Error::InvalidParameter(format!("max_lag {max_lag} must be below half the length {}", a.len())));
    }
    let n = a.len();
    let max_lag = max_lag as i64;
    let mut by_lag = Vec::with_capacity(2 * max_lag as usize + 1);
    for lag in -max_lag..=max_lag {
        let shift = lag.unsigned_abs() as usize;
        let (sa, sb) = if lag >= 0 { (&a[..n - shift], &b[shift..]) } else { (&a[shift..], &b[..n - shift]) };
        match pearson(sa, sb) {
            Ok(rho) => by_lag.push((lag, rho)),
            Err(Error::ZeroVariance(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let &(best_lag, best_rho) = by_lag
        .iter()
        .fold(None, |best: Option<&(i64, f64)>, cur| match best {
            Some(b) if b.1.abs() >= cur.1.abs() => Some(b),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::ZeroVariance("every lag overlap is constant".into()))?;
    Ok(CrossCorrelation { by_lag, best_lag, best_rho })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rho: f64,
    pub abs_rho: f64,
    pub best_lag: i64,
    pub best_lag_rho: f64,
    pub n: usize,
}

/// Compares an estimate with the ground truth at lag 0 and over `[-max_lag, max_lag]`.
pub fn evaluate(estimate: &[f64], truth: &[f64], max_lag: usize) -> Result<EvaluationReport> {
    let rho = pearson(estimate, truth)?;
    let cc = cross_correlation(estimate, truth, max_lag)?;
    Ok(EvaluationReport { rho, abs_rho: rho.abs(), best_lag: cc.best_lag, best_lag_rho: cc.best_rho, n: estimate.len() })
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub values: Vec<f64>,
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Median absolute deviation from the median (unscaled).
    pub median_absolute_deviation: f64,
    pub min: f64,
    pub max: f64,
    /// Values beyond 1.5 IQR from the quartiles.
    pub outliers: Vec<f64>,
}

/// Robust summary of per-run absolute correlations.
pub fn batch_summary(values: &[f64]) -> Result<BatchSummary> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("batch summary of an empty list".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = quantile_sorted(&sorted, 0.5);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - median).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    Ok(BatchSummary {
        values: values.to_vec(),
        n: values.len(),
        median,
        q1,
        q3,
        median_absolute_deviation: quantile_sorted(&dev, 0.5),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        outliers: values.iter().copied().filter(|v| *v < lo || *v > hi).collect(),
    })
}

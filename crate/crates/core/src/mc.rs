//! Monte Carlo check of the aggregated law: simulate an MA(q) path, take
//! rolling sums and compare the empirical LQD with the analytic value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lqd::{log_quantile_difference, lqd_formula, QuantileLevels};
use crate::ma::{aggregate_distribution, aggregate_series, MAModel};
use crate::stable::{sample_stable, RngSeed};

/// Smallest sample `empirical_lqd` accepts.
pub const MIN_EMPIRICAL_LEN: usize = 100;
/// Smallest aggregated sample `verify` accepts.
pub const MIN_VERIFY_LEN: usize = 10_000;

/// Applies the MA filter to an innovation sequence; the output has
/// `innovations.len() - q` values, the first built from `innovations[..=q]`.
pub fn ma_filter(theta: &[f64], innovations: &[f64]) -> Vec<f64> {
    let q = theta.len() - 1;
    if innovations.len() <= q {
        return Vec::new();
    }
    (q..innovations.len()).map(|t| theta.iter().enumerate().map(|(j, th)| th * innovations[t - j]).sum()).collect()
}

/// `n` consecutive values of `X_t`, driven by `n + q` innovation draws.
pub fn simulate_ma(model: &MAModel, n: usize, seed: RngSeed) -> Vec<f64> {
    let innovations = sample_stable(model.innovation(), n + model.order(), seed);
    ma_filter(model.theta(), &innovations)
}

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending slice.
pub fn empirical_quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn lqd_of_sorted(sorted: &[f64], levels: QuantileLevels) -> Result<f64> {
    let spread = empirical_quantile_sorted(sorted, levels.p2()) - empirical_quantile_sorted(sorted, levels.p1());
    if !(spread > 0.0) {
        return Err(Error::NonPositiveSpread(spread));
    }
    Ok(spread.ln())
}

/// `ln(q̂_p2 - q̂_p1)` from type-7 sample quantiles.
pub fn empirical_lqd(x: &[f64], levels: QuantileLevels) -> Result<f64> {
    if x.len() < MIN_EMPIRICAL_LEN {
        return Err(Error::SampleTooSmall { len: x.len(), min: MIN_EMPIRICAL_LEN });
    }
    let mut sorted = x.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    lqd_of_sorted(&sorted, levels)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Number of nonoverlapping batches for the batch-means standard error.
    pub batches: usize,
    /// Pass threshold in standard errors.
    pub k: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { batches: 50, k: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub model: MAModel,
    pub r: usize,
    pub levels: QuantileLevels,
    pub n: usize,
    pub seed: RngSeed,
    /// LQD of the aggregated stable law.
    pub analytic_lqd: f64,
    /// Closed-form value; `None` when the closed form does not hold.
    pub formula_lqd: Option<f64>,
    pub empirical_lqd: f64,
    pub abs_error: f64,
    pub formula_abs_error: Option<f64>,
    pub mc_stderr_estimate: f64,
    pub k: f64,
    pub pass: bool,
}

pub fn verify(
    model: &MAModel,
    r: usize,
    levels: QuantileLevels,
    n: usize,
    seed: RngSeed,
) -> Result<VerificationReport> {
    verify_with(model, r, levels, n, seed, VerifyOptions::default())
}

/// Simulates `n` aggregated values and compares their LQD with both
/// analytic routes.
///
/// Consecutive rolling sums share innovations, so the standard error comes
/// from nonoverlapping batch means; each batch must span at least
/// `10 (r + q)` values.
pub fn verify_with(
    model: &MAModel,
    r: usize,
    levels: QuantileLevels,
    n: usize,
    seed: RngSeed,
    options: VerifyOptions,
) -> Result<VerificationReport> {
    let q = model.order();
    let min_r = q.max(1);
    if r < min_r {
        return Err(Error::AggregationLevel { r: r as f64, min: min_r as f64 });
    }
    if n < MIN_VERIFY_LEN {
        return Err(Error::SampleTooSmall { len: n, min: MIN_VERIFY_LEN });
    }
    let batches = options.batches.max(2);
    let batch_len = n / batches;
    let min_batch = (10 * (r + q)).max(MIN_EMPIRICAL_LEN);
    if batch_len < min_batch {
        return Err(Error::SampleTooSmall { len: n, min: batches * min_batch });
    }

    let x = simulate_ma(model, n + r - 1, seed);
    let s = aggregate_series(&x, r)?;

    let mut batch_values = Vec::with_capacity(batches);
    for chunk in s.chunks_exact(batch_len).take(batches) {
        let mut sorted = chunk.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        batch_values.push(lqd_of_sorted(&sorted, levels)?);
    }
    let b = batch_values.len() as f64;
    let mean = batch_values.iter().sum::<f64>() / b;
    let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let stderr = (var / b).sqrt();

    let empirical = empirical_lqd(&s, levels)?;
    let analytic = log_quantile_difference(&aggregate_distribution(model, r)?, levels)?;
    let formula = match lqd_formula(model, r as f64, levels) {
        Ok(v) => Some(v),
        Err(Error::ConditionsNotSatisfied) => None,
        Err(e) => return Err(e),
    };
    let abs_error = (empirical - analytic).abs();
    let formula_abs_error = formula.map(|f| (empirical - f).abs());
    let limit = options.k * stderr;
    let pass = abs_error <= limit && formula_abs_error.is_none_or(|e| e <= limit);

    Ok(VerificationReport {
        model: model.clone(),
        r,
        levels,
        n,
        seed,
        analytic_lqd: analytic,
        formula_lqd: formula,
        empirical_lqd: empirical,
        abs_error,
        formula_abs_error,
        mc_stderr_estimate: stderr,
        k: options.k,
        pass,
    })
}

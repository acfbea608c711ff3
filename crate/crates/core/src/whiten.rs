//! AR(1) residual whitening and whiteness diagnostics.
//!
//! Calibration residuals from a temperature model carry short-range serial
//! dependence. Fitting a first-order autoregression with intercept and
//! keeping its innovations removes that dependence while preserving level
//! and variability, which is what makes the innovations usable as
//! approximately exchangeable nonconformity scores. Autocorrelation and
//! Ljung-Box statistics verify the result.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::chi_squared_sf;

/// Minimum residual count for a meaningful AR(1) fit.
pub const MIN_AR1_LEN: usize = 10;

/// A fitted first-order autoregression `r_t = c + phi * r_{t-1} + e_t`.
#[derive(Debug, Clone)]
pub struct Ar1Model {
    /// Regression intercept (the autoregression's constant term).
    pub intercept_c: f64,
    /// Autoregressive coefficient.
    pub phi: f64,
    /// Innovations `e_t`, one per regression pair, in time order.
    pub innovations: Vec<f64>,
    /// Number of regression pairs used.
    pub n_used: usize,
    /// Whether `|phi| < 1`. A nonstationary fit is kept but flagged.
    pub stationary: bool,
}

/// Ljung-Box whiteness summary at a fixed significance level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhitenessReport {
    /// Sample autocorrelations at lags `1..=max_lag`.
    pub acf_values: Vec<f64>,
    pub ljung_box_stat: f64,
    pub ljung_box_df: usize,
    pub ljung_box_pvalue: f64,
    /// Significance level the pass/fail call was made at.
    pub level: f64,
    /// True when the series is consistent with white noise at `level`.
    pub passed: bool,
}

/// Fit AR(1) with intercept by conditional least squares: OLS of `r_t` on
/// `(1, r_{t-1})` over consecutive pairs.
pub fn fit_ar1(residuals: &[f64]) -> Result<Ar1Model> {
    let dates: Vec<NaiveDate> = consecutive_dates(residuals.len());
    fit_ar1_gapped(&dates, residuals, 1).map(|(m, _)| m)
}

/// AR(1) fit over a dated residual sequence with calendar gaps.
///
/// Consecutive available residuals no more than `max_gap_days` apart form a
/// regression pair; a longer gap breaks the chain, so the point after the gap
/// contributes no innovation. Returns the model and, for each innovation, the
/// index (into `residuals`) of the time-`t` point it belongs to.
pub fn fit_ar1_gapped(
    dates: &[NaiveDate],
    residuals: &[f64],
    max_gap_days: i64,
) -> Result<(Ar1Model, Vec<usize>)> {
    if dates.len() != residuals.len() {
        return Err(Error::Config(format!(
            "{} dates for {} residuals",
            dates.len(),
            residuals.len()
        )));
    }
    if residuals.len() < MIN_AR1_LEN {
        return Err(Error::InsufficientData(format!(
            "AR(1) needs at least {MIN_AR1_LEN} residuals, got {}",
            residuals.len()
        )));
    }

    let mut prev: Vec<f64> = Vec::new();
    let mut cur: Vec<f64> = Vec::new();
    let mut cur_idx: Vec<usize> = Vec::new();
    for t in 1..residuals.len() {
        let gap = (dates[t] - dates[t - 1]).num_days();
        if gap <= max_gap_days {
            prev.push(residuals[t - 1]);
            cur.push(residuals[t]);
            cur_idx.push(t);
        }
    }
    if prev.len() < MIN_AR1_LEN - 1 {
        return Err(Error::InsufficientData(format!(
            "only {} usable consecutive residual pairs after gap handling",
            prev.len()
        )));
    }

    let n = prev.len() as f64;
    let mean_prev = prev.iter().sum::<f64>() / n;
    let mean_cur = cur.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in prev.iter().zip(&cur) {
        sxx += (x - mean_prev) * (x - mean_prev);
        sxy += (x - mean_prev) * (y - mean_cur);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegressor(
            "lagged residuals have zero variance".into(),
        ));
    }
    let phi = sxy / sxx;
    let intercept_c = mean_cur - phi * mean_prev;
    let innovations: Vec<f64> = prev
        .iter()
        .zip(&cur)
        .map(|(&x, &y)| y - intercept_c - phi * x)
        .collect();

    Ok((
        Ar1Model {
            intercept_c,
            phi,
            n_used: innovations.len(),
            stationary: phi.abs() < 1.0,
            innovations,
        },
        cur_idx,
    ))
}

fn consecutive_dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
    (0..n)
        .map(|i| start + chrono::Duration::days(i as i64))
        .collect()
}

/// Sample autocorrelations at lags `1..=max_lag` with the biased (length-n)
/// denominator.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::Range(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|&x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "autocorrelation of a constant series".into(),
        ));
    }
    Ok((1..=max_lag)
        .map(|k| {
            series[k..]
                .iter()
                .zip(series)
                .map(|(&a, &b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / denom
        })
        .collect())
}

/// Ljung-Box whiteness test.
///
/// `Q = n (n + 2) * sum_k acf(k)^2 / (n - k)` over lags `1..=lags`, referred
/// to chi-squared with `lags - fitted_ar_params` degrees of freedom. Pass
/// `fitted_ar_params = 1` when testing AR(1) innovations and `0` for a raw
/// series.
pub fn ljung_box(
    series: &[f64],
    lags: usize,
    fitted_ar_params: usize,
    level: f64,
) -> Result<WhitenessReport> {
    let n = series.len();
    if lags == 0 || 2 * lags >= n {
        return Err(Error::Range(format!(
            "lags {lags} must satisfy 0 < lags < n/2 (n = {n})"
        )));
    }
    let rho = acf(series, lags)?;
    let q = n as f64
        * (n as f64 + 2.0)
        * rho
            .iter()
            .enumerate()
            .map(|(i, &r)| r * r / (n - (i + 1)) as f64)
            .sum::<f64>();
    let df = lags.saturating_sub(fitted_ar_params).max(1);
    let pvalue = chi_squared_sf(q, df);
    Ok(WhitenessReport {
        acf_values: rho,
        ljung_box_stat: q,
        ljung_box_df: df,
        ljung_box_pvalue: pvalue,
        level,
        passed: pvalue > level,
    })
}

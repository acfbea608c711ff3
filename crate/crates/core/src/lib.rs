//! Short-lead temperature forecasting for threshold-sensitive settings.
//!
//! The pipeline trains quantile gradient boosting on lagged weather-station
//! features, whitens calibration residuals with an AR(1) model to obtain
//! approximately exchangeable nonconformity scores, and builds regime-split
//! adaptive conformal prediction regions from per-regime quantile regression
//! forests over those scores. Diagnostics (variable importance, partial
//! dependence, binned threshold-exceedance rates) round out the reporting.
//!
//! Modules mirror the pipeline stages:
//!
//! - [`ingest`]: station CSV parsing, daily snapshot selection, lagged features
//! - [`boost`]: pinball loss, gradient trees, calibration-based stopping
//! - [`whiten`]: AR(1) fitting, autocorrelation, Ljung-Box whiteness tests
//! - [`qrf`]: quantile regression forests over nonconformity scores
//! - [`conformal`]: regime split, calibration, adaptive prediction regions
//! - [`report`]: importance, partial dependence, exceedance bins, loess
//! - [`pipeline`]: the staged CLI commands and their file artifacts

pub mod boost;
pub mod config;
pub mod conformal;
pub mod dataset;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod model_io;
pub mod pipeline;
pub mod qrf;
pub mod quantile;
pub mod report;
pub mod simulate;
pub mod stats;
pub mod svg;
pub mod tree;
pub mod whiten;

pub use error::{Error, Result};

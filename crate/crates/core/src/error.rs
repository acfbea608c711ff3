//! Crate-wide error type.

use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised anywhere in the forecasting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file (bad header, unreadable cell that must parse).
    #[error("format error: {0}")]
    Format(String),

    /// An input that must contain data is empty.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// The preceding year's tail is absent, so the named dates cannot be lagged.
    #[error("boundary data missing: no source observations for {}", format_dates(.dates))]
    BoundaryData { dates: Vec<NaiveDate> },

    /// Invalid or inconsistent configuration (schema mismatch, bad parameter).
    #[error("configuration error: {0}")]
    Config(String),

    /// Too few observations for the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A regressor with zero variance cannot be fit.
    #[error("degenerate regressor: {0}")]
    DegenerateRegressor(String),

    /// Correlation of a constant series is undefined.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// Argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Index or count outside the valid range.
    #[error("range error: {0}")]
    Range(String),

    /// Invariant violation that indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    /// Underlying file-system failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_dates(dates: &[NaiveDate]) -> String {
    if dates.is_empty() {
        return "(no dates)".to_string();
    }
    let shown: Vec<String> = dates.iter().take(20).map(|d| d.to_string()).collect();
    let mut out = shown.join(", ");
    if dates.len() > 20 {
        out.push_str(&format!(", ... ({} dates total)", dates.len()));
    }
    out
}

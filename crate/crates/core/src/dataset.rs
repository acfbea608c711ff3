//! Column-major numeric dataset consumed by the learners.
//!
//! The ingest module produces [`crate::ingest::FeatureTable`]s keyed by date;
//! this type is the schema-checked numeric view the boosting, forest, and
//! conformal layers operate on.

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Per-feature summary retained for partial dependence and grid construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// A fixed-schema table of predictor columns plus a response column.
#[derive(Debug, Clone)]
pub struct Dataset {
    feature_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    responses: Vec<f64>,
    dates: Option<Vec<NaiveDate>>,
}

impl Dataset {
    /// Build from parallel columns. Every column must match the response length.
    pub fn new(
        feature_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        responses: Vec<f64>,
        dates: Option<Vec<NaiveDate>>,
    ) -> Result<Self> {
        if feature_names.len() != columns.len() {
            return Err(Error::Config(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                columns.len()
            )));
        }
        let n = responses.len();
        for (name, col) in feature_names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::Config(format!(
                    "column '{}' has {} rows, expected {}",
                    name,
                    col.len(),
                    n
                )));
            }
        }
        if let Some(d) = &dates {
            if d.len() != n {
                return Err(Error::Config(format!(
                    "{} dates for {} rows",
                    d.len(),
                    n
                )));
            }
        }
        Ok(Self {
            feature_names,
            columns,
            responses,
            dates,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.responses.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature][row]
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    /// Materialize one row of predictors.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Mean/min/max per feature over this dataset.
    pub fn feature_stats(&self) -> Vec<FeatureStat> {
        self.columns
            .iter()
            .map(|col| {
                let n = col.len().max(1) as f64;
                let mean = col.iter().sum::<f64>() / n;
                let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
                for &v in col {
                    min = min.min(v);
                    max = max.max(v);
                }
                FeatureStat { mean, min, max }
            })
            .collect()
    }

    /// Error unless `other` carries the identical feature schema.
    pub fn check_same_schema(&self, other: &Dataset) -> Result<()> {
        if self.feature_names != other.feature_names {
            return Err(Error::Config(format!(
                "feature schema mismatch: {:?} vs {:?}",
                self.feature_names, other.feature_names
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_columns() {
        let err = Dataset::new(
            vec!["a".into()],
            vec![vec![1.0, 2.0]],
            vec![0.0],
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn stats_cover_range() {
        let ds = Dataset::new(
            vec!["a".into()],
            vec![vec![1.0, 3.0, 5.0]],
            vec![0.0, 0.0, 0.0],
            None,
        )
        .unwrap();
        let s = &ds.feature_stats()[0];
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 5.0);
    }
}

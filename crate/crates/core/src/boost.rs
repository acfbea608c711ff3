//! Quantile gradient boosting: pinball loss, gradient trees with shrinkage,
//! terminal-node quantile updates, and calibration-based iteration selection.
//!
//! Each stage fits a least-squares tree to the pinball-loss subgradients, then
//! overwrites every leaf with the empirical tau-quantile of the current
//! residuals in that leaf (the exact per-leaf minimizer of the loss), scaled
//! by the shrinkage factor. The calibration set plays no role in tree fitting;
//! its loss curve only selects the iteration count.

use crate::dataset::{Dataset, FeatureStat};
use crate::error::{Error, Result};
use crate::quantile;
use crate::tree::{fit_tree, Node, RegressionTree, TreeParams};

/// Pinball-loss configuration.
#[derive(Debug, Clone, Copy)]
pub struct QuantileLossParams {
    /// Target quantile level in (0, 1).
    pub tau: f64,
}

impl Default for QuantileLossParams {
    fn default() -> Self {
        Self { tau: 0.60 }
    }
}

impl QuantileLossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Config(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        Ok(())
    }
}

/// Boosting hyperparameters. Defaults are the slow-convergence settings the
/// full pipeline runs with.
#[derive(Debug, Clone, Copy)]
pub struct BoostParams {
    pub shrinkage: f64,
    pub interaction_depth: usize,
    pub min_obs_in_node: usize,
    pub max_iterations: usize,
    /// Calibration loss is recorded every `eval_stride` iterations (and at the
    /// final iteration when the stride does not divide it).
    pub eval_stride: usize,
    /// Recorded for provenance. The exact split search has no stochastic
    /// element, so training is deterministic regardless of this value.
    pub seed: u64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            shrinkage: 0.0001,
            interaction_depth: 6,
            min_obs_in_node: 6,
            max_iterations: 40_000,
            eval_stride: 100,
            seed: 0,
        }
    }
}

impl BoostParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(Error::Config(format!(
                "shrinkage must lie in (0, 1], got {}",
                self.shrinkage
            )));
        }
        if self.interaction_depth < 1 {
            return Err(Error::Config("interaction_depth must be >= 1".into()));
        }
        if self.min_obs_in_node < 1 {
            return Err(Error::Config("min_obs_in_node must be >= 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if self.eval_stride < 1 {
            return Err(Error::Config("eval_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// One recorded point of a loss curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossPoint {
    pub iteration: usize,
    pub loss: f64,
}

/// A trained boosting ensemble.
#[derive(Debug, Clone)]
pub struct TrainedBooster {
    /// Initial fit: the empirical tau-quantile of the training responses.
    pub base_value: f64,
    pub trees: Vec<RegressionTree>,
    pub shrinkage: f64,
    pub tau: f64,
    /// Iteration count minimizing the recorded calibration loss (first
    /// minimizer on ties).
    pub best_iter: usize,
    pub feature_names: Vec<String>,
    /// Training-set mean/min/max per feature, for partial dependence grids.
    pub feature_stats: Vec<FeatureStat>,
    /// Calibration pinball loss at each recorded iteration.
    pub loss_curve: Vec<LossPoint>,
    /// Training pinball loss at the same recorded iterations.
    pub train_loss_curve: Vec<LossPoint>,
    /// Set when the calibration loss was still strictly decreasing over the
    /// final recorded evaluations, i.e. more iterations may have helped.
    pub early_stop_warning: bool,
}

/// Pinball loss `L_tau(y, y_hat)`.
///
/// Returns `tau * (y - y_hat)` when `y >= y_hat`, else `(1 - tau) * (y_hat - y)`.
pub fn quantile_loss(y: f64, y_hat: f64, tau: f64) -> Result<f64> {
    if !y.is_finite() || !y_hat.is_finite() || !tau.is_finite() {
        return Err(Error::Domain(format!(
            "quantile_loss requires finite inputs (y={y}, y_hat={y_hat}, tau={tau})"
        )));
    }
    Ok(pinball(y, y_hat, tau))
}

#[inline]
pub(crate) fn pinball(y: f64, y_hat: f64, tau: f64) -> f64 {
    if y >= y_hat {
        tau * (y - y_hat)
    } else {
        (1.0 - tau) * (y_hat - y)
    }
}

/// Subgradient of the pinball loss with respect to the fit, negated:
/// `tau` above the fit, `tau - 1` below, `0` exactly at it.
pub fn negative_gradient(y: f64, y_hat: f64, tau: f64) -> f64 {
    if y > y_hat {
        tau
    } else if y < y_hat {
        tau - 1.0
    } else {
        0.0
    }
}

/// Per-leaf update: the empirical tau-quantile (lower interpolation) of the
/// residuals routed to the leaf.
pub fn terminal_update(residuals_in_leaf: &[f64], tau: f64) -> Result<f64> {
    if residuals_in_leaf.is_empty() {
        return Err(Error::Internal(
            "terminal_update on an empty leaf; min_obs_in_node was violated".into(),
        ));
    }
    Ok(quantile::quantile(residuals_in_leaf, tau))
}

fn mean_pinball(responses: &[f64], fits: &[f64], tau: f64) -> f64 {
    let total: f64 = responses
        .iter()
        .zip(fits)
        .map(|(&y, &f)| pinball(y, f, tau))
        .sum();
    total / responses.len() as f64
}

/// Train a quantile gradient boosting ensemble.
///
/// The calibration table is used only to record the loss curve that selects
/// `best_iter`; trees are fit exclusively on the training table.
pub fn train(
    train_data: &Dataset,
    calib_data: &Dataset,
    loss: &QuantileLossParams,
    params: &BoostParams,
) -> Result<TrainedBooster> {
    loss.validate()?;
    params.validate()?;
    if train_data.n_rows() == 0 {
        return Err(Error::EmptyInput("training table has no rows".into()));
    }
    if calib_data.n_rows() == 0 {
        return Err(Error::EmptyInput("calibration table has no rows".into()));
    }
    train_data.check_same_schema(calib_data)?;

    let tau = loss.tau;
    let responses = train_data.responses();
    let n = responses.len();
    let base_value = quantile::quantile(responses, tau);

    let mut fit_train = vec![base_value; n];
    let mut fit_calib = vec![base_value; calib_data.n_rows()];
    let mut grad = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.max_iterations);
    let mut loss_curve = Vec::new();
    let mut train_loss_curve = Vec::new();

    let tree_params = TreeParams {
        max_depth: params.interaction_depth,
        min_obs_in_node: params.min_obs_in_node,
    };

    for iter in 1..=params.max_iterations {
        for i in 0..n {
            grad[i] = negative_gradient(responses[i], fit_train[i], tau);
        }
        let mut fitted = fit_tree(train_data, &grad, &tree_params);

        // Overwrite each leaf with the tau-quantile of the current residuals.
        let mut residuals = Vec::new();
        for (leaf_idx, rows) in &fitted.leaf_rows {
            residuals.clear();
            residuals.extend(rows.iter().map(|&r| responses[r as usize] - fit_train[r as usize]));
            let update = terminal_update(&residuals, tau)?;
            fitted.tree.nodes[*leaf_idx] = Node::Leaf { value: update };
            let step = params.shrinkage * update;
            for &r in rows {
                fit_train[r as usize] += step;
            }
        }
        for (i, f) in fit_calib.iter_mut().enumerate() {
            *f += params.shrinkage * fitted.tree.predict_dataset_row(calib_data, i);
        }
        trees.push(fitted.tree);

        if iter % params.eval_stride == 0 || iter == params.max_iterations {
            loss_curve.push(LossPoint {
                iteration: iter,
                loss: mean_pinball(calib_data.responses(), &fit_calib, tau),
            });
            train_loss_curve.push(LossPoint {
                iteration: iter,
                loss: mean_pinball(responses, &fit_train, tau),
            });
        }
    }

    let best_iter = loss_curve
        .iter()
        .min_by(|a, b| a.loss.total_cmp(&b.loss).then(a.iteration.cmp(&b.iteration)))
        .map(|p| p.iteration)
        .expect("at least one evaluation is always recorded");

    let early_stop_warning = tail_strictly_decreasing(&loss_curve, 10);

    Ok(TrainedBooster {
        base_value,
        trees,
        shrinkage: params.shrinkage,
        tau,
        best_iter,
        feature_names: train_data.feature_names().to_vec(),
        feature_stats: train_data.feature_stats(),
        loss_curve,
        train_loss_curve,
        early_stop_warning,
    })
}

/// True when the final `window` recorded losses are strictly decreasing.
fn tail_strictly_decreasing(curve: &[LossPoint], window: usize) -> bool {
    let k = window.min(curve.len());
    if k < 2 {
        return false;
    }
    curve[curve.len() - k..]
        .windows(2)
        .all(|w| w[1].loss < w[0].loss)
}

impl TrainedBooster {
    /// Predict rows of a dataset using the first `n_iter` trees.
    pub fn predict(&self, data: &Dataset, n_iter: usize) -> Result<Vec<f64>> {
        if n_iter > self.trees.len() {
            return Err(Error::Range(format!(
                "n_iter {} exceeds stored tree count {}",
                n_iter,
                self.trees.len()
            )));
        }
        if data.feature_names() != self.feature_names.as_slice() {
            return Err(Error::Config(format!(
                "prediction schema {:?} does not match trained schema {:?}",
                data.feature_names(),
                self.feature_names
            )));
        }
        let mut out = vec![self.base_value; data.n_rows()];
        for tree in &self.trees[..n_iter] {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.shrinkage * tree.predict_dataset_row(data, i);
            }
        }
        Ok(out)
    }

    /// Predict with the selected iteration count.
    pub fn predict_best(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.predict(data, self.best_iter)
    }

    /// Predict a single predictor row with the first `n_iter` trees.
    pub fn predict_row(&self, row: &[f64], n_iter: usize) -> Result<f64> {
        if n_iter > self.trees.len() {
            return Err(Error::Range(format!(
                "n_iter {} exceeds stored tree count {}",
                n_iter,
                self.trees.len()
            )));
        }
        if row.len() != self.feature_names.len() {
            return Err(Error::Config(format!(
                "row has {} features, trained schema has {}",
                row.len(),
                self.feature_names.len()
            )));
        }
        let mut out = self.base_value;
        for tree in &self.trees[..n_iter] {
            out += self.shrinkage * tree.predict_row(row);
        }
        Ok(out)
    }
}

//! Quantile regression forests over nonconformity scores.
//!
//! Trees are grown as ordinary least-squares regression trees on the scores,
//! but every leaf retains the in-bag sample indices rather than a mean. A
//! query routes through all trees; each retained score receives weight
//! `1 / (leaf size * n_trees)`, and conditional quantiles are read from the
//! resulting weighted empirical CDF with the crate-wide lower-interpolation
//! convention. Predictions are therefore always one of the stored scores.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::quantile::WEIGHT_SNAP;

/// Forest hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct QrfParams {
    pub n_trees: usize,
    pub min_node_size: usize,
    /// Candidate features sampled at each split; `None` means `ceil(p / 3)`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for QrfParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            min_node_size: 5,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

/// A node of a score-retaining tree.
#[derive(Debug, Clone, PartialEq)]
pub enum QrfNode {
    Split {
        feature: u16,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        /// In-bag positions into `training_scores`, with bootstrap multiplicity.
        indices: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrfTree {
    pub nodes: Vec<QrfNode>,
}

impl QrfTree {
    /// Leaf node index a covariate row routes to.
    pub fn route(&self, row: &[f64]) -> usize {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                QrfNode::Leaf { .. } => return idx,
                QrfNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }
}

/// A fitted forest with its retained score values.
#[derive(Debug, Clone)]
pub struct QrfModel {
    pub trees: Vec<QrfTree>,
    pub training_scores: Vec<f64>,
    pub covariate_names: Vec<String>,
    /// Positions into `training_scores` sorted ascending by (value, index);
    /// fixes the summation order of the weighted CDF.
    score_order: Vec<u32>,
}

impl QrfModel {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Fit a quantile regression forest of `scores` on `covariates`.
///
/// The responses stored in `covariates` are ignored; `scores` are the
/// regression targets and the values retained in the leaves.
pub fn fit_qrf(covariates: &Dataset, scores: &[f64], params: &QrfParams) -> Result<QrfModel> {
    if covariates.n_rows() != scores.len() {
        return Err(Error::Config(format!(
            "{} covariate rows for {} scores",
            covariates.n_rows(),
            scores.len()
        )));
    }
    if scores.len() < params.min_node_size {
        return Err(Error::InsufficientData(format!(
            "need at least min_node_size = {} scores, got {}",
            params.min_node_size,
            scores.len()
        )));
    }
    if let Some(m) = params.features_per_split {
        if m == 0 || m > covariates.n_features() {
            return Err(Error::Config(format!(
                "features_per_split {} outside 1..={}",
                m,
                covariates.n_features()
            )));
        }
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain("scores must be finite".into()));
    }
    let p = covariates.n_features();
    let mtry = params.features_per_split.unwrap_or_else(|| p.div_ceil(3)).min(p);
    let n = scores.len();

    let trees: Vec<QrfTree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(params.seed.wrapping_add((t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let rows: Vec<u32> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n) as u32).collect()
            } else {
                (0..n as u32).collect()
            };
            let mut nodes = Vec::new();
            grow(
                covariates,
                scores,
                rows,
                params.min_node_size,
                mtry,
                &mut rng,
                &mut nodes,
            );
            QrfTree { nodes }
        })
        .collect();

    let mut score_order: Vec<u32> = (0..n as u32).collect();
    score_order.sort_by(|&a, &b| {
        scores[a as usize]
            .total_cmp(&scores[b as usize])
            .then(a.cmp(&b))
    });

    Ok(QrfModel {
        trees,
        training_scores: scores.to_vec(),
        covariate_names: covariates.feature_names().to_vec(),
        score_order,
    })
}

fn grow(
    data: &Dataset,
    scores: &[f64],
    rows: Vec<u32>,
    min_node: usize,
    mtry: usize,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<QrfNode>,
) -> u32 {
    let idx = nodes.len();
    if rows.len() < 2 * min_node {
        nodes.push(QrfNode::Leaf { indices: rows });
        return idx as u32;
    }
    let first = scores[rows[0] as usize];
    if rows.iter().all(|&r| scores[r as usize] == first) {
        nodes.push(QrfNode::Leaf { indices: rows });
        return idx as u32;
    }

    // Sample mtry distinct candidate features (partial Fisher-Yates).
    let p = data.n_features();
    let mut candidates: Vec<usize> = (0..p).collect();
    for i in 0..mtry.min(p) {
        let j = rng.random_range(i..p);
        candidates.swap(i, j);
    }
    candidates.truncate(mtry);
    candidates.sort_unstable();

    let best = best_split(data, scores, &rows, &candidates, min_node);
    let (feature, threshold) = match best {
        Some(b) => b,
        None => {
            nodes.push(QrfNode::Leaf { indices: rows });
            return idx as u32;
        }
    };

    let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = rows
        .iter()
        .partition(|&&r| data.value(r as usize, feature) <= threshold);

    nodes.push(QrfNode::Split {
        feature: feature as u16,
        threshold,
        left: 0,
        right: 0,
    });
    let left = grow(data, scores, left_rows, min_node, mtry, rng, nodes);
    let right = grow(data, scores, right_rows, min_node, mtry, rng, nodes);
    match &mut nodes[idx] {
        QrfNode::Split { left: l, right: r, .. } => {
            *l = left;
            *r = right;
        }
        _ => unreachable!(),
    }
    idx as u32
}

fn best_split(
    data: &Dataset,
    scores: &[f64],
    rows: &[u32],
    candidates: &[usize],
    min_node: usize,
) -> Option<(usize, f64)> {
    let n = rows.len();
    let total: f64 = rows.iter().map(|&r| scores[r as usize]).sum();
    let parent_score = total * total / n as f64;
    let mut best: Option<(usize, f64, f64)> = None;
    let mut order: Vec<u32> = Vec::with_capacity(n);
    for &feature in candidates {
        let col = data.column(feature);
        order.clear();
        order.extend_from_slice(rows);
        order.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
        let mut left_sum = 0.0;
        for k in 1..n {
            left_sum += scores[order[k - 1] as usize];
            if k < min_node || n - k < min_node {
                continue;
            }
            let v_prev = col[order[k - 1] as usize];
            let v_next = col[order[k] as usize];
            if v_prev == v_next {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / k as f64
                + right_sum * right_sum / (n - k) as f64
                - parent_score;
            if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.2) {
                best = Some((feature, v_prev + (v_next - v_prev) / 2.0, gain));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}

/// Conditional score quantile at level `p` for one covariate row.
///
/// Each tree routes the row to a leaf; every in-bag score there receives
/// weight `1 / (leaf size * n_trees)`. The quantile is the first stored score,
/// in ascending (value, index) order, whose cumulative weight reaches `p`.
pub fn predict_quantile(model: &QrfModel, row: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile level {p} outside (0, 1)")));
    }
    if row.len() != model.covariate_names.len() {
        return Err(Error::Config(format!(
            "covariate row has {} values, model expects {}",
            row.len(),
            model.covariate_names.len()
        )));
    }
    let mut weights = vec![0.0f64; model.training_scores.len()];
    let n_trees = model.trees.len() as f64;
    for tree in &model.trees {
        let leaf = tree.route(row);
        if let QrfNode::Leaf { indices } = &tree.nodes[leaf] {
            if indices.is_empty() {
                continue;
            }
            let w = 1.0 / (indices.len() as f64 * n_trees);
            for &i in indices {
                weights[i as usize] += w;
            }
        }
    }
    let target = p - WEIGHT_SNAP;
    let mut cum = 0.0;
    for &i in &model.score_order {
        cum += weights[i as usize];
        if cum >= target {
            return Ok(model.training_scores[i as usize]);
        }
    }
    Ok(model.training_scores[*model.score_order.last().expect("nonempty scores") as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn covariates(cols: Vec<Vec<f64>>) -> Dataset {
        let names = (0..cols.len()).map(|i| format!("c{i}")).collect();
        let n = cols[0].len();
        Dataset::new(names, cols, vec![0.0; n], None).unwrap()
    }

    #[test]
    fn degenerate_forest_single_leaf_holds_all() {
        let data = covariates(vec![vec![1.0, 2.0, 3.0, 4.0]]);
        let scores = vec![-3.0, -1.0, 0.0, 2.0];
        let model = fit_qrf(
            &data,
            &scores,
            &QrfParams {
                n_trees: 1,
                min_node_size: 4,
                bootstrap: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(model.trees[0].nodes.len(), 1);
        match &model.trees[0].nodes[0] {
            QrfNode::Leaf { indices } => assert_eq!(indices, &vec![0, 1, 2, 3]),
            _ => panic!("expected single leaf"),
        }
        // Hand-computed weighted CDF: equal quarters, so p = 0.5 lands on -1.
        assert_eq!(predict_quantile(&model, &[2.5], 0.5).unwrap(), -1.0);
        assert_eq!(predict_quantile(&model, &[2.5], 0.999).unwrap(), 2.0);
    }

    #[test]
    fn constant_scores_predict_constant() {
        let data = covariates(vec![(0..40).map(f64::from).collect()]);
        let scores = vec![1.25; 40];
        let model = fit_qrf(
            &data,
            &scores,
            &QrfParams {
                n_trees: 25,
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        for p in [0.05, 0.5, 0.95] {
            assert_eq!(predict_quantile(&model, &[7.0], p).unwrap(), 1.25);
        }
    }

    #[test]
    fn heteroscedastic_spread_detected() {
        // Score spread doubles when the covariate is positive.
        let mut xs = Vec::new();
        let mut scores = Vec::new();
        for i in 0..200 {
            let x = if i % 2 == 0 { -1.0 } else { 1.0 };
            let unit = ((i * 37) % 100) as f64 / 50.0 - 1.0; // deterministic in [-1, 1)
            let spread = if x > 0.0 { 4.0 } else { 2.0 };
            xs.push(x);
            scores.push(unit * spread);
        }
        let data = covariates(vec![xs]);
        let model = fit_qrf(
            &data,
            &scores,
            &QrfParams {
                n_trees: 100,
                seed: 9,
                ..Default::default()
            },
        )
        .unwrap();
        let hi_pos = predict_quantile(&model, &[1.0], 0.9).unwrap();
        let hi_neg = predict_quantile(&model, &[-1.0], 0.9).unwrap();
        assert!(
            hi_pos > hi_neg,
            "0.9-quantile {hi_pos} (x>0) should exceed {hi_neg} (x<0)"
        );
    }

    #[test]
    fn duplicated_trees_cancel() {
        let data = covariates(vec![(0..30).map(f64::from).collect()]);
        let scores: Vec<f64> = (0..30).map(|i| (i as f64 * 1.3).sin()).collect();
        // bootstrap off and all features considered: every tree is identical
        let base = QrfParams {
            min_node_size: 5,
            features_per_split: Some(1),
            bootstrap: false,
            seed: 11,
            ..Default::default()
        };
        let one = fit_qrf(&data, &scores, &QrfParams { n_trees: 1, ..base }).unwrap();
        let two = fit_qrf(&data, &scores, &QrfParams { n_trees: 2, ..base }).unwrap();
        for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let a = predict_quantile(&one, &[13.0], p).unwrap();
            let b = predict_quantile(&two, &[13.0], p).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn monotone_in_p_and_bounded() {
        let data = covariates(vec![
            (0..80).map(|i| (i as f64 * 0.77).sin()).collect(),
            (0..80).map(|i| (i as f64 * 0.31).cos()).collect(),
        ]);
        let scores: Vec<f64> = (0..80).map(|i| ((i * 61) % 80) as f64 / 10.0 - 4.0).collect();
        let model = fit_qrf(&data, &scores, &QrfParams { n_trees: 60, seed: 5, ..Default::default() })
            .unwrap();
        let (lo, hi) = scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
        for row in [[0.3, -0.2], [-0.9, 0.9], [0.0, 0.0]] {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..20 {
                let q = predict_quantile(&model, &row, i as f64 / 20.0).unwrap();
                assert!(q >= prev, "quantiles must be monotone in p");
                assert!(q >= lo && q <= hi);
                prev = q;
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let data = covariates(vec![(0..50).map(f64::from).collect()]);
        let scores: Vec<f64> = (0..50).map(|i| ((i * 17) % 50) as f64).collect();
        let params = QrfParams { n_trees: 40, seed: 123, ..Default::default() };
        let a = fit_qrf(&data, &scores, &params).unwrap();
        let b = fit_qrf(&data, &scores, &params).unwrap();
        for p in [0.1, 0.5, 0.9] {
            let qa = predict_quantile(&a, &[25.0], p).unwrap();
            let qb = predict_quantile(&b, &[25.0], p).unwrap();
            assert_eq!(qa.to_bits(), qb.to_bits());
        }
    }

    #[test]
    fn argument_errors() {
        let data = covariates(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]]);
        let scores = vec![0.0; 5];
        assert!(matches!(
            fit_qrf(&data, &scores, &QrfParams::default()),
            Err(Error::Config(_))
        ));
        let scores = vec![0.0, 0.5, 0.2, 0.1, 0.9, 0.4];
        let model = fit_qrf(
            &data,
            &scores,
            &QrfParams { n_trees: 3, min_node_size: 2, bootstrap: false, ..Default::default() },
        )
        .unwrap();
        assert!(matches!(predict_quantile(&model, &[1.0], 0.0), Err(Error::Domain(_))));
        assert!(matches!(predict_quantile(&model, &[1.0], 1.0), Err(Error::Domain(_))));
    }
}

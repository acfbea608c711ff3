//! Least-squares regression trees for the boosting stages.
//!
//! Split search is exact: every midpoint between consecutive distinct sorted
//! values of every feature is a candidate, scored by the reduction in sum of
//! squared targets. No row or column subsampling. Ties go to the lowest
//! feature index, then the lowest threshold, so fitting is fully
//! deterministic.

use crate::dataset::Dataset;

/// A node in preorder storage. Children are indices into the node vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: u16,
        threshold: f64,
        /// Squared-error reduction achieved by this split, on the target scale
        /// the tree was fit to. Retained for importance attribution.
        gain: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        value: f64,
    },
}

/// A fitted tree. Rows route left when `x[feature] <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    /// Single-leaf tree carrying a constant.
    pub fn constant(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Node index of the leaf a predictor row routes to.
    pub fn route(&self, row: &[f64]) -> usize {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { .. } => return idx,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
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

    /// Leaf node index for row `i` of a column-major dataset.
    pub fn route_dataset(&self, data: &Dataset, i: usize) -> usize {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { .. } => return idx,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    idx = if data.value(i, *feature as usize) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.nodes[self.route(row)] {
            Node::Leaf { value } => *value,
            _ => unreachable!("route returns a leaf"),
        }
    }

    pub fn predict_dataset_row(&self, data: &Dataset, i: usize) -> f64 {
        match &self.nodes[self.route_dataset(data, i)] {
            Node::Leaf { value } => *value,
            _ => unreachable!("route returns a leaf"),
        }
    }

    /// Longest root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        fn rec(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + rec(nodes, *left as usize).max(rec(nodes, *right as usize))
                }
            }
        }
        rec(&self.nodes, 0)
    }
}

/// Constraints for one tree fit.
#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_obs_in_node: usize,
}

/// A tree plus, for every leaf node index, the training rows routed there.
#[derive(Debug)]
pub struct FittedTree {
    pub tree: RegressionTree,
    /// (leaf node index, rows in that leaf). Covers every input row exactly once.
    pub leaf_rows: Vec<(usize, Vec<u32>)>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Fit a least-squares tree to `targets` over the rows of `data`.
///
/// A node becomes a leaf when its depth reaches `max_depth`, it has fewer
/// than `2 * min_obs_in_node` rows, its targets are all equal, or no split
/// with positive gain and both children >= `min_obs_in_node` exists. Leaf
/// values are the node target means; boosting overwrites them afterwards.
pub fn fit_tree(data: &Dataset, targets: &[f64], params: &TreeParams) -> FittedTree {
    assert_eq!(data.n_rows(), targets.len());
    let rows: Vec<u32> = (0..data.n_rows() as u32).collect();
    let mut nodes = Vec::new();
    let mut leaf_rows = Vec::new();
    build(data, targets, params, rows, 0, &mut nodes, &mut leaf_rows);
    FittedTree {
        tree: RegressionTree { nodes },
        leaf_rows,
    }
}

fn build(
    data: &Dataset,
    targets: &[f64],
    params: &TreeParams,
    rows: Vec<u32>,
    depth: usize,
    nodes: &mut Vec<Node>,
    leaf_rows: &mut Vec<(usize, Vec<u32>)>,
) -> u32 {
    let idx = nodes.len();
    if depth >= params.max_depth || rows.len() < 2 * params.min_obs_in_node {
        return push_leaf(nodes, leaf_rows, targets, rows, idx);
    }
    // Constant targets cannot be improved; guard exactly so a constant fit
    // yields a single leaf rather than noise splits from rounding.
    let first = targets[rows[0] as usize];
    if rows.iter().all(|&r| targets[r as usize] == first) {
        return push_leaf(nodes, leaf_rows, targets, rows, idx);
    }
    let best = match find_best_split(data, targets, &rows, params.min_obs_in_node) {
        Some(b) => b,
        None => return push_leaf(nodes, leaf_rows, targets, rows, idx),
    };

    let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = rows
        .iter()
        .partition(|&&r| data.value(r as usize, best.feature) <= best.threshold);

    nodes.push(Node::Split {
        feature: best.feature as u16,
        threshold: best.threshold,
        gain: best.gain,
        left: 0,
        right: 0,
    });
    let left = build(data, targets, params, left_rows, depth + 1, nodes, leaf_rows);
    let right = build(data, targets, params, right_rows, depth + 1, nodes, leaf_rows);
    match &mut nodes[idx] {
        Node::Split {
            left: l, right: r, ..
        } => {
            *l = left;
            *r = right;
        }
        _ => unreachable!(),
    }
    idx as u32
}

fn push_leaf(
    nodes: &mut Vec<Node>,
    leaf_rows: &mut Vec<(usize, Vec<u32>)>,
    targets: &[f64],
    rows: Vec<u32>,
    idx: usize,
) -> u32 {
    let mean = rows.iter().map(|&r| targets[r as usize]).sum::<f64>() / rows.len() as f64;
    nodes.push(Node::Leaf { value: mean });
    leaf_rows.push((idx, rows));
    idx as u32
}

fn find_best_split(
    data: &Dataset,
    targets: &[f64],
    rows: &[u32],
    min_obs: usize,
) -> Option<BestSplit> {
    let n = rows.len();
    let total: f64 = rows.iter().map(|&r| targets[r as usize]).sum();
    let parent_score = total * total / n as f64;

    let mut best: Option<BestSplit> = None;
    let mut order: Vec<u32> = Vec::with_capacity(n);
    for feature in 0..data.n_features() {
        let col = data.column(feature);
        order.clear();
        order.extend_from_slice(rows);
        order.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));

        let mut left_sum = 0.0;
        for k in 1..n {
            left_sum += targets[order[k - 1] as usize];
            if k < min_obs || n - k < min_obs {
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
            if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    feature,
                    threshold: v_prev + (v_next - v_prev) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

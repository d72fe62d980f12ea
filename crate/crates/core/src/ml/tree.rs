//! Greedy variance-reduction regression trees (CART).

use serde::{Deserialize, Serialize};

use super::Samples;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: usize,
    /// Nodes with fewer samples than this become leaves.
    pub min_samples_split: usize,
    /// Minimum samples per leaf (the hessian sum under squared loss).
    pub min_child_weight: usize,
    /// Minimum total squared-error reduction required to split.
    pub gamma: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 6,
            min_samples_split: 2,
            min_child_weight: 1,
            gamma: 0.0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::invalid("max_depth", "must be >= 1"));
        }
        if self.min_samples_split < 2 {
            return Err(Error::invalid("min_samples_split", "must be >= 2"));
        }
        if self.min_child_weight < 1 {
            return Err(Error::invalid("min_child_weight", "must be >= 1"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid("gamma", "must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes are stored in pre-order; the root is `nodes[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

/// Threshold between two consecutive distinct sorted values. Falls back to
/// the lower value when the midpoint rounds onto the upper one.
pub fn split_threshold(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

/// Gains below `SPLIT_EPS * sum(y^2)` are rounding noise. The same slack
/// decides near-ties in favour of the earlier (feature, threshold).
pub const SPLIT_EPS: f64 = 1e-12;

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl RegressionTree {
    pub fn fit(data: &Samples, cfg: &TreeConfig) -> Result<Self> {
        cfg.validate()?;
        if data.is_empty() {
            return Err(Error::Empty("training data"));
        }
        let mut tree = RegressionTree { nodes: Vec::new() };
        let idx: Vec<usize> = (0..data.len()).collect();
        tree.grow(data, cfg, idx, 0);
        Ok(tree)
    }

    fn grow(&mut self, data: &Samples, cfg: &TreeConfig, idx: Vec<usize>, depth: usize) -> usize {
        let slot = self.nodes.len();
        let n = idx.len();
        let mean = idx.iter().map(|&i| data.targets[i]).sum::<f64>() / n as f64;
        self.nodes.push(Node::Leaf { value: mean });

        if depth >= cfg.max_depth || n < cfg.min_samples_split {
            return slot;
        }
        let Some(best) = best_split(data, cfg, &idx, mean) else {
            return slot;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| data.rows[i][best.feature] <= best.threshold);
        let l = self.grow(data, cfg, left, depth + 1);
        let r = self.grow(data, cfg, right, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        slot
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { value } => Some(*value),
            _ => None,
        })
    }
}

fn best_split(data: &Samples, cfg: &TreeConfig, idx: &[usize], mean: f64) -> Option<BestSplit> {
    let n = idx.len();
    let scale: f64 = idx.iter().map(|&i| data.targets[i].powi(2)).sum();
    let slack = SPLIT_EPS * scale;
    // Centered targets keep the prefix sums well conditioned.
    let total: f64 = idx.iter().map(|&i| data.targets[i] - mean).sum();
    let parent = total * total / n as f64;

    let mut order = idx.to_vec();
    let mut best: Option<BestSplit> = None;
    for feature in 0..data.n_features() {
        order.sort_by(|&a, &b| data.rows[a][feature].total_cmp(&data.rows[b][feature]));
        let mut left_sum = 0.0;
        for pos in 1..n {
            left_sum += data.targets[order[pos - 1]] - mean;
            let lo = data.rows[order[pos - 1]][feature];
            let hi = data.rows[order[pos]][feature];
            if lo == hi {
                continue;
            }
            let (nl, nr) = (pos, n - pos);
            if nl < cfg.min_child_weight || nr < cfg.min_child_weight {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / nl as f64 + right_sum * right_sum / nr as f64 - parent;
            let better = match &best {
                None => true,
                Some(b) => gain > b.gain + slack,
            };
            if better {
                best = Some(BestSplit {
                    feature,
                    threshold: split_threshold(lo, hi),
                    gain,
                });
            }
        }
    }
    best.filter(|b| b.gain > slack && b.gain > 0.0 && b.gain >= cfg.gamma)
}

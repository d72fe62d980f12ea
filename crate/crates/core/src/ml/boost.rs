//! Stagewise gradient boosting under squared loss.
//!
//! Every sample has unit hessian, so `min_child_weight` is a minimum leaf
//! size and `gamma` a minimum squared-error reduction per split.

use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeConfig};
use super::Samples;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub tree: TreeConfig,
    /// Starting prediction. `None` uses the training-target mean.
    pub base_score: Option<f64>,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            n_estimators: 200,
            learning_rate: 0.1,
            tree: TreeConfig {
                max_depth: 6,
                min_samples_split: 2,
                min_child_weight: 5,
                gamma: 0.5,
            },
            base_score: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTrees {
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

impl BoostedTrees {
    pub fn fit(data: &Samples, cfg: &BoostConfig) -> Result<Self> {
        Self::fit_traced(data, cfg).map(|(m, _)| m)
    }

    /// Also returns the training MSE after each stage.
    pub fn fit_traced(data: &Samples, cfg: &BoostConfig) -> Result<(Self, Vec<f64>)> {
        if cfg.n_estimators < 1 {
            return Err(Error::invalid("n_estimators", "must be >= 1"));
        }
        if !(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0) {
            return Err(Error::invalid("learning_rate", "must be in (0, 1]"));
        }
        cfg.tree.validate()?;
        if data.is_empty() {
            return Err(Error::Empty("training data"));
        }
        let n = data.len() as f64;
        let base = cfg
            .base_score
            .unwrap_or_else(|| data.targets.iter().sum::<f64>() / n);
        let mut pred = vec![base; data.len()];
        let mut residuals = data.clone();
        let mut trees = Vec::with_capacity(cfg.n_estimators);
        let mut trace = Vec::with_capacity(cfg.n_estimators);
        for _ in 0..cfg.n_estimators {
            for (r, (y, p)) in residuals
                .targets
                .iter_mut()
                .zip(data.targets.iter().zip(&pred))
            {
                *r = y - p;
            }
            let tree = RegressionTree::fit(&residuals, &cfg.tree)?;
            for (p, row) in pred.iter_mut().zip(&data.rows) {
                *p += cfg.learning_rate * tree.predict_row(row);
            }
            trees.push(tree);
            let mse = data
                .targets
                .iter()
                .zip(&pred)
                .map(|(y, p)| (y - p).powi(2))
                .sum::<f64>()
                / n;
            trace.push(mse);
        }
        Ok((
            BoostedTrees {
                base_score: base,
                learning_rate: cfg.learning_rate,
                trees,
            },
            trace,
        ))
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base_score
            + self.learning_rate * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }
}

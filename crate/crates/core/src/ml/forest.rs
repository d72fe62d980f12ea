use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeConfig};
use super::Samples;
use crate::error::{Error, Result};
use crate::seed::derive_indexed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub tree: TreeConfig,
    pub bootstrap: bool,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 10,
            tree: TreeConfig {
                max_depth: 20,
                min_samples_split: 10,
                min_child_weight: 1,
                gamma: 0.0,
            },
            bootstrap: true,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
}

impl RandomForest {
    /// Each tree sees a same-size bootstrap resample drawn from a seed
    /// derived from `cfg.seed` and the tree index, so the result does not
    /// depend on the thread schedule.
    pub fn fit(data: &Samples, cfg: &ForestConfig) -> Result<Self> {
        if cfg.n_estimators < 1 {
            return Err(Error::invalid("n_estimators", "must be >= 1"));
        }
        cfg.tree.validate()?;
        if data.is_empty() {
            return Err(Error::Empty("training data"));
        }
        let trees = (0..cfg.n_estimators)
            .into_par_iter()
            .map(|i| {
                if cfg.bootstrap {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_indexed(cfg.seed, i as u64));
                    let n = data.len();
                    let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                    RegressionTree::fit(&data.select(&picks), &cfg.tree)
                } else {
                    RegressionTree::fit(data, &cfg.tree)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomForest { trees })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }
}

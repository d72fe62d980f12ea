//! Regression learners and the two-stage distance/rounds pipeline.

pub mod boost;
pub mod forest;
pub mod grid;
pub mod linear;
pub mod pipeline;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use boost::{BoostConfig, BoostedTrees};
pub use forest::{ForestConfig, RandomForest};
pub use grid::{grid_search, kfold_indices, GridResult};
pub use linear::LinearModel;
pub use pipeline::{
    fit_pipeline, fit_two_stage, stage1_grid, stage2_grid, tune_two_stage, PipelineModel,
    TunedPipeline,
};
pub use tree::{Node, RegressionTree, TreeConfig};

/// Row-major feature matrix with one target per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl Samples {
    pub fn new(rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("training data"));
        }
        if rows.len() != targets.len() {
            return Err(Error::invalid(
                "training data",
                format!("{} rows but {} targets", rows.len(), targets.len()),
            ));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::invalid("training data", "ragged feature rows"));
        }
        if rows
            .iter()
            .flatten()
            .chain(&targets)
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("training data", "non-finite value"));
        }
        Ok(Samples { rows, targets })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn select(&self, idx: &[usize]) -> Samples {
        Samples {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            targets: idx.iter().map(|&i| self.targets[i]).collect(),
        }
    }

    pub fn standardization(&self) -> Standardization {
        Standardization::fit(&self.rows)
    }
}

/// Per-feature mean and scale. Constant features get scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardization {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let p = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mean: Vec<f64> = (0..p)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let scale = (0..p)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardization { mean, scale }
    }

    pub fn apply_one(&self, j: usize, x: f64) -> f64 {
        (x - self.mean[j]) / self.scale[j]
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &x)| self.apply_one(j, x))
            .collect()
    }
}

/// Hyperparameters for any of the learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Tree(TreeConfig),
    Forest(ForestConfig),
    Boosted(BoostConfig),
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Learner {
    Tree(RegressionTree),
    Forest(RandomForest),
    Boosted(BoostedTrees),
    Linear(LinearModel),
}

impl Learner {
    pub fn fit(data: &Samples, cfg: &ModelConfig) -> Result<Self> {
        Ok(match cfg {
            ModelConfig::Tree(c) => Learner::Tree(RegressionTree::fit(data, c)?),
            ModelConfig::Forest(c) => Learner::Forest(RandomForest::fit(data, c)?),
            ModelConfig::Boosted(c) => Learner::Boosted(BoostedTrees::fit(data, c)?),
            ModelConfig::Linear => Learner::Linear(LinearModel::fit(data)?),
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Learner::Tree(m) => m.predict_row(row),
            Learner::Forest(m) => m.predict_row(row),
            Learner::Boosted(m) => m.predict_row(row),
            Learner::Linear(m) => m.predict_row(row),
        }
    }
}

/// A trained regressor plus the names of the features it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub schema: Vec<String>,
    pub learner: Learner,
}

impl RegressionModel {
    pub fn fit(data: &Samples, schema: &[&str], cfg: &ModelConfig) -> Result<Self> {
        if data.n_features() != schema.len() {
            return Err(Error::SchemaMismatch {
                expected: schema.len(),
                got: data.n_features(),
            });
        }
        let learner = Learner::fit(data, cfg)?;
        Ok(RegressionModel {
            schema: schema.iter().map(|s| s.to_string()).collect(),
            learner,
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.schema.len() {
            return Err(Error::SchemaMismatch {
                expected: self.schema.len(),
                got: row.len(),
            });
        }
        Ok(self.learner.predict_row(row))
    }

    pub fn kind(&self) -> &'static str {
        match self.learner {
            Learner::Tree(_) => "tree",
            Learner::Forest(_) => "forest",
            Learner::Boosted(_) => "boosted",
            Learner::Linear(_) => "linear",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_reject_ragged_and_mismatched() {
        assert!(Samples::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0.0, 0.0]).is_err());
        assert!(Samples::new(vec![vec![1.0]], vec![0.0, 1.0]).is_err());
        assert!(Samples::new(vec![vec![f64::NAN]], vec![0.0]).is_err());
    }

    #[test]
    fn schema_is_enforced_at_prediction() {
        let data = Samples::new(vec![vec![1.0], vec![2.0]], vec![1.0, 2.0]).unwrap();
        let m =
            RegressionModel::fit(&data, &["x"], &ModelConfig::Tree(TreeConfig::default())).unwrap();
        assert!(m.predict(&[1.0]).is_ok());
        assert!(matches!(
            m.predict(&[1.0, 2.0]),
            Err(Error::SchemaMismatch {
                expected: 1,
                got: 2
            })
        ));
        assert!(RegressionModel::fit(&data, &["x", "y"], &ModelConfig::Linear).is_err());
    }

    #[test]
    fn standardization_handles_constant_columns() {
        let s = Standardization::fit(&[vec![1.0, 5.0], vec![3.0, 5.0]]);
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        assert_eq!(s.apply(&[3.0, 5.0]), vec![1.0, 0.0]);
    }
}

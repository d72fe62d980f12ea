use serde::{Deserialize, Serialize};

use super::grid::grid_search;
use super::{BoostConfig, ForestConfig, ModelConfig, RegressionModel, Samples};
use crate::domain::{
    floor_raw, round_distance, DatasetRecord, PredictionRequest, PredictionResult,
};
use crate::error::{Error, Result};
use crate::labels::{
    build_labels, stage1_features, stage2_features, LabeledExample, STAGE1_SCHEMA, STAGE2_SCHEMA,
};

/// Distance regressor feeding a rounds regressor. Stage 2 always sees the
/// rounded stage-1 distance, both in training and at inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineModel {
    pub stage1: RegressionModel,
    pub stage2: RegressionModel,
    /// Largest optimal distance seen in training.
    pub max_distance: u32,
}

/// Default tool: boosted trees for distance, a random forest for rounds.
pub fn fit_pipeline(
    records: &[DatasetRecord],
    targets: &[f64],
    stage1: &BoostConfig,
    stage2: &ForestConfig,
) -> Result<PipelineModel> {
    let examples = build_labels(records, targets)?;
    fit_two_stage(
        &examples,
        &ModelConfig::Boosted(*stage1),
        &ModelConfig::Forest(*stage2),
    )
}

fn stage1_samples(examples: &[LabeledExample]) -> Result<Samples> {
    Samples::new(
        examples
            .iter()
            .map(|e| stage1_features(&e.request))
            .collect(),
        examples.iter().map(|e| e.optimal.distance as f64).collect(),
    )
}

fn stage2_samples(
    examples: &[LabeledExample],
    stage1: &RegressionModel,
    s1: &Samples,
) -> Result<Samples> {
    let mut rows = Vec::with_capacity(examples.len());
    for (e, x) in examples.iter().zip(&s1.rows) {
        let d = round_distance(floor_raw(stage1.predict(x)?, "raw distance")?)?;
        rows.push(stage2_features(d, e.request.log_target()));
    }
    Samples::new(
        rows,
        examples.iter().map(|e| e.optimal.rounds as f64).collect(),
    )
}

/// Boosted grid: depth {4, 6, 8} x learning rate {0.05, 0.1, 0.2}.
pub fn stage1_grid(base: &BoostConfig) -> Vec<BoostConfig> {
    let mut out = Vec::new();
    for max_depth in [4, 6, 8] {
        for learning_rate in [0.05, 0.1, 0.2] {
            let mut c = *base;
            c.tree.max_depth = max_depth;
            c.learning_rate = learning_rate;
            out.push(c);
        }
    }
    out
}

/// Forest grid: depth {10, 20, 30} x min_samples_split {5, 10}.
pub fn stage2_grid(base: &ForestConfig) -> Vec<ForestConfig> {
    let mut out = Vec::new();
    for max_depth in [10, 20, 30] {
        for min_samples_split in [5, 10] {
            let mut c = *base;
            c.tree.max_depth = max_depth;
            c.tree.min_samples_split = min_samples_split;
            out.push(c);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedPipeline {
    pub stage1: BoostConfig,
    pub stage2: ForestConfig,
    /// Cross-validated MSE of each winner.
    pub stage1_mse: f64,
    pub stage2_mse: f64,
}

/// Grid-searches stage 1, then stage 2 on the rounded output of the chosen
/// stage-1 model.
pub fn tune_two_stage(
    examples: &[LabeledExample],
    stage1_grid: &[BoostConfig],
    stage2_grid: &[ForestConfig],
    folds: usize,
    seed: u64,
) -> Result<TunedPipeline> {
    if examples.is_empty() {
        return Err(Error::Empty("labelled training examples"));
    }
    let s1 = stage1_samples(examples)?;
    let g1: Vec<ModelConfig> = stage1_grid
        .iter()
        .copied()
        .map(ModelConfig::Boosted)
        .collect();
    let r1 = grid_search(&s1, &g1, folds, seed)?;
    let best1 = stage1_grid[r1.best_index];

    let stage1 = RegressionModel::fit(&s1, &STAGE1_SCHEMA, &r1.best)?;
    let s2 = stage2_samples(examples, &stage1, &s1)?;
    let g2: Vec<ModelConfig> = stage2_grid
        .iter()
        .copied()
        .map(ModelConfig::Forest)
        .collect();
    let r2 = grid_search(&s2, &g2, folds, seed)?;
    Ok(TunedPipeline {
        stage1: best1,
        stage2: stage2_grid[r2.best_index],
        stage1_mse: r1.score,
        stage2_mse: r2.score,
    })
}

pub fn fit_two_stage(
    examples: &[LabeledExample],
    stage1_cfg: &ModelConfig,
    stage2_cfg: &ModelConfig,
) -> Result<PipelineModel> {
    if examples.is_empty() {
        return Err(Error::Empty("labelled training examples"));
    }
    let s1 = stage1_samples(examples)?;
    let stage1 = RegressionModel::fit(&s1, &STAGE1_SCHEMA, stage1_cfg)?;
    let s2 = stage2_samples(examples, &stage1, &s1)?;
    let stage2 = RegressionModel::fit(&s2, &STAGE2_SCHEMA, stage2_cfg)?;

    let max_distance = examples
        .iter()
        .map(|e| e.optimal.distance)
        .max()
        .unwrap_or(3);
    Ok(PipelineModel {
        stage1,
        stage2,
        max_distance,
    })
}

impl PipelineModel {
    pub fn predict(&self, req: &PredictionRequest) -> Result<PredictionResult> {
        let raw_distance = floor_raw(self.stage1.predict(&stage1_features(req))?, "raw distance")?;
        let rounded_distance = round_distance(raw_distance)?;
        let raw_rounds = floor_raw(
            self.stage2
                .predict(&stage2_features(rounded_distance, req.log_target()))?,
            "raw rounds",
        )?;
        PredictionResult::from_raw(raw_distance, raw_rounds)
    }
}

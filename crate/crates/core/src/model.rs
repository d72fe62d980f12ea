//! Trained recommenders and their on-disk format.
//!
//! A model file is a single JSON document:
//!
//! ```text
//! { "format": "qecdesign-model", "format_version": 1, "model": { "type": "pipeline" | "heuristic", ... } }
//! ```
//!
//! Trees are stored as pre-order node arrays, floats with round-trip
//! precision, so a reloaded model predicts bit-identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::HeuristicWeights;
use crate::domain::{PredictionRequest, PredictionResult};
use crate::error::{Error, Result};
use crate::heuristics::{HeuristicKind, HeuristicModel};
use crate::labels::LabeledExample;
use crate::ml::{fit_two_stage, BoostConfig, ForestConfig, Learner, ModelConfig, PipelineModel};

pub const FORMAT_TAG: &str = "qecdesign-model";
pub const FORMAT_VERSION: u32 = 1;

/// Anything that maps an inverse query to code parameters.
pub trait Recommender: Sync {
    fn recommend(&self, req: &PredictionRequest) -> Result<PredictionResult>;

    /// Largest distance the model was trained on; predictions beyond it are
    /// outside the training domain.
    fn max_distance(&self) -> u32;
}

impl Recommender for PipelineModel {
    fn recommend(&self, req: &PredictionRequest) -> Result<PredictionResult> {
        self.predict(req)
    }

    fn max_distance(&self) -> u32 {
        self.max_distance
    }
}

impl Recommender for HeuristicModel {
    fn recommend(&self, req: &PredictionRequest) -> Result<PredictionResult> {
        self.predict(req)
    }

    fn max_distance(&self) -> u32 {
        self.max_distance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Model {
    Pipeline(PipelineModel),
    Heuristic(HeuristicModel),
}

impl Model {
    /// `pipeline`, `linear`, or `heuristic:<kind>`.
    pub fn name(&self) -> String {
        match self {
            Model::Pipeline(p) => match (&p.stage1.learner, &p.stage2.learner) {
                (Learner::Boosted(_), Learner::Forest(_)) => "pipeline".into(),
                (Learner::Linear(_), Learner::Linear(_)) => "linear".into(),
                _ => format!("two_stage:{}+{}", p.stage1.kind(), p.stage2.kind()),
            },
            Model::Heuristic(h) => format!("heuristic:{}", h.kind),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Envelope<'a> {
            format: &'static str,
            format_version: u32,
            model: &'a Model,
        }
        serde_json::to_string(&Envelope {
            format: FORMAT_TAG,
            format_version: FORMAT_VERSION,
            model: self,
        })
        .map_err(|e| Error::Corrupt(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Corrupt(e.to_string()))?;
        if doc.get("format").and_then(Value::as_str) != Some(FORMAT_TAG) {
            return Err(Error::Corrupt("missing or unknown `format` tag".into()));
        }
        match doc.get("format_version") {
            Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION as u64) => {}
            Some(v) => {
                return Err(Error::VersionMismatch {
                    found: v.to_string(),
                    expected: FORMAT_VERSION,
                })
            }
            None => return Err(Error::Corrupt("missing `format_version`".into())),
        }
        let body = doc
            .get("model")
            .cloned()
            .ok_or_else(|| Error::Corrupt("missing `model`".into()))?;
        serde_json::from_value(body).map_err(|e| Error::Corrupt(e.to_string()))
    }
}

impl Recommender for Model {
    fn recommend(&self, req: &PredictionRequest) -> Result<PredictionResult> {
        match self {
            Model::Pipeline(m) => m.predict(req),
            Model::Heuristic(m) => m.predict(req),
        }
    }

    fn max_distance(&self) -> u32 {
        match self {
            Model::Pipeline(m) => m.max_distance,
            Model::Heuristic(m) => m.max_distance,
        }
    }
}

/// Which recommender to train: `pipeline`, `linear`, or `heuristic:<kind>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    Pipeline,
    Linear,
    Heuristic(HeuristicKind),
}

/// Hyperparameters shared by every [`ModelSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainSettings {
    pub stage1: BoostConfig,
    pub stage2: ForestConfig,
    pub weights: HeuristicWeights,
}

impl ModelSpec {
    /// The eight heuristic variants, the linear baseline and the pipeline.
    pub fn roster() -> Vec<ModelSpec> {
        let mut all: Vec<ModelSpec> = HeuristicKind::all()
            .into_iter()
            .map(ModelSpec::Heuristic)
            .collect();
        all.push(ModelSpec::Linear);
        all.push(ModelSpec::Pipeline);
        all
    }

    pub fn fit(&self, examples: &[LabeledExample], settings: &TrainSettings) -> Result<Model> {
        Ok(match self {
            ModelSpec::Pipeline => Model::Pipeline(fit_two_stage(
                examples,
                &ModelConfig::Boosted(settings.stage1),
                &ModelConfig::Forest(settings.stage2),
            )?),
            ModelSpec::Linear => Model::Pipeline(fit_two_stage(
                examples,
                &ModelConfig::Linear,
                &ModelConfig::Linear,
            )?),
            ModelSpec::Heuristic(kind) => Model::Heuristic(HeuristicModel::fit(
                *kind,
                examples.to_vec(),
                settings.weights,
            )?),
        })
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelSpec::Pipeline => f.write_str("pipeline"),
            ModelSpec::Linear => f.write_str("linear"),
            ModelSpec::Heuristic(k) => write!(f, "heuristic:{k}"),
        }
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pipeline" => Ok(ModelSpec::Pipeline),
            "linear" => Ok(ModelSpec::Linear),
            _ => match s.strip_prefix("heuristic:") {
                Some(kind) => Ok(ModelSpec::Heuristic(kind.parse()?)),
                None => Err(Error::invalid("model", format!("unknown model `{s}`"))),
            },
        }
    }
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    let text = model.to_json()?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Model::from_json(&text)
}

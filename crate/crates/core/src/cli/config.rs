//! Tool configuration, read from TOML. Every section and key is optional;
//! unknown keys are rejected.
//!
//! ```toml
//! [oracle]
//! amplitude = 0.1
//! threshold = 0.01
//! decoherence = 1.0
//! floor = 1e-15
//! [oracle.weights]
//! gate = 0.5
//! depolarizing = 0.3
//! readout = 0.15
//! reset = 0.05
//!
//! [sweep]
//! distances = [3, 5, 7, 9, 11, 13, 15, 17, 19]
//! rounds_min = 1
//! rounds_max = 60
//! termination_rate = 1e-9
//! profiles_per_run = 22
//! [sweep.ranges]
//! depolarizing = [1e-4, 4e-4]
//! gate = [5e-4, 1.6e-3]
//! reset = [1e-4, 5e-4]
//! readout = [1e-3, 3e-3]
//!
//! [weights]          # heuristic scalarization
//! gate = 0.4
//! depolarizing = 0.3
//! readout = 0.2
//! reset = 0.1
//!
//! [stage1]           # boosted trees, distance
//! n_estimators = 200
//! learning_rate = 0.1
//! [stage1.tree]
//! max_depth = 6
//! min_samples_split = 2
//! min_child_weight = 5
//! gamma = 0.5
//!
//! [stage2]           # random forest, rounds
//! n_estimators = 10
//! bootstrap = true
//! [stage2.tree]
//! max_depth = 20
//! min_samples_split = 10
//! min_child_weight = 1
//! gamma = 0.0
//!
//! [split]
//! test_fraction = 0.2
//!
//! [labels]
//! targets = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9]
//!
//! [tuning]
//! folds = 5
//!
//! [paths]
//! data = "dataset.csv"
//! model = "model.json"
//! out_dir = "reports"
//! ```
//!
//! A `tree` table, when present, must list all four keys.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::HeuristicWeights;
use crate::error::{Error, Result};
use crate::eval::SplitConfig;
use crate::labels::TARGET_MENU;
use crate::ml::{BoostConfig, ForestConfig};
use crate::model::TrainSettings;
use crate::oracle::{OracleConfig, SweepConfig};
use crate::seed::derive;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelConfig {
    pub targets: Vec<f64>,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            targets: TARGET_MENU.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningConfig {
    pub folds: usize,
}

impl Default for TuningConfig {
    fn default() -> Self {
        TuningConfig { folds: 5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub data: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub oracle: OracleConfig,
    pub sweep: SweepConfig,
    pub weights: HeuristicWeights,
    pub stage1: BoostConfig,
    pub stage2: ForestConfig,
    pub split: SplitConfig,
    pub labels: LabelConfig,
    pub tuning: TuningConfig,
    pub paths: PathsConfig,
}

impl ToolConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ToolConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Defaults when `path` is `None`.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        self.oracle.validate()?;
        self.sweep.validate()?;
        self.weights.validate()?;
        self.stage1.tree.validate()?;
        self.stage2.tree.validate()?;
        if self.stage1.n_estimators < 1 || self.stage2.n_estimators < 1 {
            return Err(Error::invalid("n_estimators", "must be >= 1"));
        }
        if !(self.stage1.learning_rate > 0.0 && self.stage1.learning_rate <= 1.0) {
            return Err(Error::invalid("stage1.learning_rate", "must be in (0, 1]"));
        }
        if !(self.split.test_fraction > 0.0 && self.split.test_fraction < 1.0) {
            return Err(Error::invalid("split.test_fraction", "must be in (0, 1)"));
        }
        if self.labels.targets.is_empty() {
            return Err(Error::Empty("labels.targets"));
        }
        if self.labels.targets.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::invalid(
                "labels.targets",
                "every target must be in (0, 1)",
            ));
        }
        if self.tuning.folds < 2 {
            return Err(Error::invalid("tuning.folds", "must be >= 2"));
        }
        Ok(())
    }

    /// Fans one master seed out to every seeded component.
    pub fn with_seed(mut self, master: u64) -> Self {
        self.sweep.seed = derive(master, "sweep");
        self.split.seed = derive(master, "split");
        self.stage2.seed = derive(master, "forest");
        self
    }

    pub fn train_settings(&self) -> TrainSettings {
        TrainSettings {
            stage1: self.stage1,
            stage2: self.stage2,
            weights: self.weights,
        }
    }
}

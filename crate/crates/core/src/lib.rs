//! Inverse design of rotated surface codes.
//!
//! Given a device noise profile and a target logical error rate, recommend
//! the smallest code distance and number of syndrome rounds expected to
//! reach it. Recommendations come from a two-stage regression pipeline
//! (boosted trees for distance, a random forest for rounds) or from one of
//! several instance-based baselines, trained on forward experiments that are
//! either generated by the built-in synthetic oracle or imported as CSV.

pub mod cli;
pub mod domain;
pub mod error;
pub mod eval;
pub mod heuristics;
pub mod labels;
pub mod ml;
pub mod model;
pub mod oracle;
pub mod seed;

pub use domain::{
    round_distance, round_rounds, scalarize, validate_profile, CodeParams, DatasetRecord,
    HeuristicWeights, NoiseProfile, PredictionRequest, PredictionResult,
};
pub use error::{Error, Result};
pub use model::{load_model, save_model, Model, ModelSpec, Recommender, TrainSettings};
pub use oracle::{
    find_optimal_params, generate_dataset, logical_error_rate, OracleConfig, SweepConfig,
};

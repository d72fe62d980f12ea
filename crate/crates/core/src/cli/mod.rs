//! The `qecdesign` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or config,
//! 3 infeasible request.

pub mod calibration;
pub mod config;
pub mod dataset;
pub mod reports;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::domain::{CodeParams, NoiseProfile, PredictionRequest};
use crate::error::{Error, Result};
use crate::eval::{compare_models, evaluate, split_by_profile};
use crate::labels::{build_labels, LabeledExample};
use crate::ml::{stage1_grid, stage2_grid, tune_two_stage};
use crate::model::{load_model, save_model, ModelSpec, Recommender};
use crate::oracle::{effective_error, generate_dataset};
use crate::seed::derive;
use calibration::CalibrationSnapshot;
use config::ToolConfig;

#[derive(Debug, Parser)]
#[command(
    name = "qecdesign",
    version,
    about = "Recommend surface-code distance and rounds for a noise profile"
)]
pub struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep sampled noise profiles through the oracle and write a dataset CSV.
    Generate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a dataset by profile into train and test CSVs.
    Split {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
    /// Train a recommender on a dataset.
    Train {
        #[arg(long)]
        data: Option<PathBuf>,
        /// pipeline, linear, or heuristic:<kind>
        #[arg(long, default_value = "pipeline")]
        model: String,
        #[arg(long)]
        out_model: Option<PathBuf>,
        /// Cross-validated grid search before the final fit (pipeline only).
        #[arg(long)]
        tune: bool,
    },
    /// Recommend code parameters for one request.
    Predict(PredictArgs),
    /// Score a trained model against a dataset.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Train and score every model on one profile split.
    Compare {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Comma-separated model names; defaults to all ten.
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, required_unless_present = "calibration")]
    pub depol: Option<f64>,
    #[arg(long, required_unless_present = "calibration")]
    pub gate: Option<f64>,
    #[arg(long, required_unless_present = "calibration")]
    pub reset: Option<f64>,
    #[arg(long, required_unless_present = "calibration")]
    pub readout: Option<f64>,
    /// Calibration snapshot JSON in place of the four rate flags.
    #[arg(long, conflicts_with_all = ["depol", "gate", "reset", "readout"])]
    pub calibration: Option<PathBuf>,
    /// Target logical error rate.
    #[arg(long)]
    pub target: f64,
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 1,
        Error::AboveThreshold { .. } | Error::Infeasible => 3,
        _ => 2,
    }
}

fn pick(flag: Option<PathBuf>, fallback: &Option<PathBuf>, name: &'static str) -> Result<PathBuf> {
    flag.or_else(|| fallback.clone())
        .ok_or_else(|| Error::invalid(name, "not given on the command line or in [paths]"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6}"))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = ToolConfig::load_or_default(cli.config.as_deref())?.with_seed(cli.seed);
    let paths = cfg.paths.clone();
    let say = |out: &mut dyn Write, line: String| -> Result<()> {
        writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
    };

    match cli.command {
        Command::Generate { out: dest } => {
            let dest = pick(dest, &paths.data, "--out")?;
            let records = generate_dataset(&cfg.sweep, &cfg.oracle)?;
            dataset::save_records(&dest, &records)?;
            say(out, format!("records={}", records.len()))
        }
        Command::Split {
            data,
            train_out,
            test_out,
        } => {
            let records = dataset::load_records(&pick(data, &paths.data, "--data")?)?;
            let (train, test) = split_by_profile(&records, &cfg.split)?;
            dataset::save_records(&train_out, &train)?;
            dataset::save_records(&test_out, &test)?;
            say(out, format!("train_records={}", train.len()))?;
            say(out, format!("test_records={}", test.len()))
        }
        Command::Train {
            data,
            model,
            out_model,
            tune,
        } => {
            let spec: ModelSpec = model.parse()?;
            let dest = pick(out_model, &paths.model, "--out-model")?;
            let examples = load_examples(&pick(data, &paths.data, "--data")?, &cfg)?;
            let mut settings = cfg.train_settings();
            if tune {
                if spec == ModelSpec::Pipeline {
                    let t = tune_two_stage(
                        &examples,
                        &stage1_grid(&cfg.stage1),
                        &stage2_grid(&cfg.stage2),
                        cfg.tuning.folds,
                        derive(cli.seed, "cv"),
                    )?;
                    settings.stage1 = t.stage1;
                    settings.stage2 = t.stage2;
                    say(
                        out,
                        format!(
                            "tuned stage1 max_depth={} learning_rate={} cv_mse={:.6}",
                            t.stage1.tree.max_depth, t.stage1.learning_rate, t.stage1_mse
                        ),
                    )?;
                    say(
                        out,
                        format!(
                            "tuned stage2 max_depth={} min_samples_split={} cv_mse={:.6}",
                            t.stage2.tree.max_depth, t.stage2.tree.min_samples_split, t.stage2_mse
                        ),
                    )?;
                } else {
                    log::warn!("--tune only applies to the pipeline; ignored for {spec}");
                }
            }
            let model = spec.fit(&examples, &settings)?;
            let report = evaluate(&model, &examples, &cfg.oracle)?;
            save_model(&model, &dest)?;
            say(out, format!("model={}", model.name()))?;
            say(out, format!("examples={}", examples.len()))?;
            say(
                out,
                format!(
                    "train_pearson_distance={}",
                    fmt_opt(report.pearson_raw_distance)
                ),
            )?;
            say(
                out,
                format!(
                    "train_pearson_rounds={}",
                    fmt_opt(report.pearson_raw_rounds)
                ),
            )
        }
        Command::Predict(args) => {
            let model = load_model(&pick(args.model, &paths.model, "--model")?)?;
            let noise = match &args.calibration {
                Some(path) => CalibrationSnapshot::load(path)?.profile()?,
                None => NoiseProfile::new(
                    args.depol.unwrap_or_default(),
                    args.gate.unwrap_or_default(),
                    args.reset.unwrap_or_default(),
                    args.readout.unwrap_or_default(),
                )?,
            };
            let req = PredictionRequest::new(noise, args.target)?;
            let p_eff = effective_error(&noise, &cfg.oracle);
            if p_eff >= cfg.oracle.threshold {
                return Err(Error::AboveThreshold {
                    effective: p_eff,
                    threshold: cfg.oracle.threshold,
                });
            }
            let res = model.recommend(&req)?;
            if res.rounded_distance > model.max_distance() {
                log::error!(
                    "recommended distance {} exceeds the largest trained distance {}",
                    res.rounded_distance,
                    model.max_distance()
                );
                return Err(Error::Infeasible);
            }
            let params: CodeParams = res.params();
            say(out, format!("raw_distance={}", res.raw_distance))?;
            say(out, format!("rounded_distance={}", res.rounded_distance))?;
            say(out, format!("raw_rounds={}", res.raw_rounds))?;
            say(out, format!("rounded_rounds={}", res.rounded_rounds))?;
            say(out, format!("data_qubits={}", params.data_qubits()))?;
            say(out, format!("total_qubits={}", params.total_qubits()))
        }
        Command::Evaluate {
            model,
            data,
            out_dir,
        } => {
            let model = load_model(&pick(model, &paths.model, "--model")?)?;
            let examples = load_examples(&pick(data, &paths.data, "--data")?, &cfg)?;
            let dir = pick(out_dir, &paths.out_dir, "--out-dir")?;
            let report = evaluate(&model, &examples, &cfg.oracle)?;
            reports::write_evaluation(&dir, &report)?;
            say(out, format!("model={}", model.name()))?;
            say(out, format!("cases={}", report.cases))?;
            say(
                out,
                format!(
                    "pearson_raw_distance={}",
                    fmt_opt(report.pearson_raw_distance)
                ),
            )?;
            say(
                out,
                format!(
                    "pearson_rounded_distance={}",
                    fmt_opt(report.pearson_rounded_distance)
                ),
            )?;
            say(
                out,
                format!("pearson_raw_rounds={}", fmt_opt(report.pearson_raw_rounds)),
            )?;
            say(
                out,
                format!(
                    "pearson_rounded_rounds={}",
                    fmt_opt(report.pearson_rounded_rounds)
                ),
            )?;
            say(
                out,
                format!("achievement_fraction={:.6}", report.achievement_fraction),
            )?;
            say(
                out,
                format!(
                    "latency_ms={:.4}+-{:.4}",
                    report.timing.mean_ms, report.timing.std_ms
                ),
            )
        }
        Command::Compare {
            data,
            out_dir,
            models,
        } => {
            let specs = if models.is_empty() {
                ModelSpec::roster()
            } else {
                models
                    .iter()
                    .map(|m| m.parse())
                    .collect::<Result<Vec<ModelSpec>>>()?
            };
            let records = dataset::load_records(&pick(data, &paths.data, "--data")?)?;
            let dir = pick(out_dir, &paths.out_dir, "--out-dir")?;
            let (train, test) = split_by_profile(&records, &cfg.split)?;
            let train = build_labels(&train, &cfg.labels.targets)?;
            let test = build_labels(&test, &cfg.labels.targets)?;
            let rows = compare_models(&specs, &train, &test, &cfg.train_settings(), &cfg.oracle)?;
            reports::write_comparison(&dir, &rows)?;
            for r in &rows {
                say(
                    out,
                    format!(
                        "{} distance={} rounds={} achieved={:.3}",
                        r.model,
                        fmt_opt(r.pearson_distance),
                        fmt_opt(r.pearson_rounds),
                        r.achievement_fraction
                    ),
                )?;
            }
            Ok(())
        }
    }
}

fn load_examples(path: &Path, cfg: &ToolConfig) -> Result<Vec<LabeledExample>> {
    let records = dataset::load_records(path)?;
    let examples = build_labels(&records, &cfg.labels.targets)?;
    if examples.is_empty() {
        return Err(Error::Empty(
            "labelled examples (no profile reaches any target)",
        ));
    }
    Ok(examples)
}

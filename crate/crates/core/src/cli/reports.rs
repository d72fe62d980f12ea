//! Report files written by `evaluate` and `compare`.
//!
//! - `report.json`: every scalar of the evaluation plus per-case deltas and
//!   the distance heatmap. Byte-identical across identical runs.
//! - `timing.json`: per-prediction latency (wall clock, so not reproducible).
//! - `deltas.csv`: `bin_lo,bin_hi,count` over `(DLER - TLER) / TLER`, bins
//!   closed on the right.
//! - `heatmap.csv`: `optimal_distance,predicted_distance,count`.
//! - `comparison.csv`: `model,pearson_distance,pearson_rounds,achievement_fraction`,
//!   best distance Pearson first. Undefined correlations are left empty.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{delta_histogram, ComparisonRow, EvalReport};

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_evaluation(dir: &Path, report: &EvalReport) -> Result<()> {
    ensure_dir(dir)?;
    let mut v = serde_json::to_value(report).map_err(|e| Error::Corrupt(e.to_string()))?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing");
    }
    let pretty = serde_json::to_string_pretty(&v).map_err(|e| Error::Corrupt(e.to_string()))?;
    write(dir, "report.json", &(pretty + "\n"))?;
    let timing =
        serde_json::to_string_pretty(&report.timing).map_err(|e| Error::Corrupt(e.to_string()))?;
    write(dir, "timing.json", &(timing + "\n"))?;

    let mut deltas = String::from("bin_lo,bin_hi,count\n");
    for b in delta_histogram(report) {
        let _ = writeln!(deltas, "{},{},{}", b.lo, b.hi, b.count);
    }
    write(dir, "deltas.csv", &deltas)?;

    let mut heat = String::from("optimal_distance,predicted_distance,count\n");
    for c in &report.heatmap {
        let _ = writeln!(
            heat,
            "{},{},{}",
            c.optimal_distance, c.predicted_distance, c.count
        );
    }
    write(dir, "heatmap.csv", &heat)
}

pub fn write_comparison(dir: &Path, rows: &[ComparisonRow]) -> Result<()> {
    ensure_dir(dir)?;
    let mut out = String::from("model,pearson_distance,pearson_rounds,achievement_fraction\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.model,
            opt(r.pearson_distance),
            opt(r.pearson_rounds),
            r.achievement_fraction
        );
    }
    write(dir, "comparison.csv", &out)
}

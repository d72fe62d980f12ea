//! Held-out evaluation: Pearson correlation of raw and rounded predictions,
//! target achievement re-checked through the synthetic oracle, and
//! side-by-side model comparison.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{CodeParams, DatasetRecord, PredictionRequest, PredictionResult};
use crate::error::{Error, Result};
use crate::labels::{group_by_profile, LabeledExample};
use crate::model::{ModelSpec, Recommender, TrainSettings};
use crate::oracle::{logical_error_rate, meets_target, OracleConfig};

/// Sample Pearson correlation. Errors on length mismatch, fewer than two
/// points, or a constant input.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(
            "pearson",
            format!("lengths {} and {} differ", x.len(), y.len()),
        ));
    }
    if x.len() < 2 {
        return Err(Error::invalid("pearson", "need at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("pearson correlation of a constant series"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub test_fraction: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            test_fraction: 0.2,
            seed: 42,
        }
    }
}

/// Seeded random partition: `floor(n * test_fraction)` items go to the
/// test side. Both sides keep the input order.
pub fn split<T: Clone>(items: &[T], cfg: &SplitConfig) -> Result<(Vec<T>, Vec<T>)> {
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(Error::invalid("split.test_fraction", "must be in (0, 1)"));
    }
    if items.len() < 5 {
        return Err(Error::invalid(
            "split",
            format!("need at least 5 items, got {}", items.len()),
        ));
    }
    let n_test = (items.len() as f64 * cfg.test_fraction).floor() as usize;
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut is_test = vec![false; items.len()];
    order[..n_test].iter().for_each(|&i| is_test[i] = true);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (item, t) in items.iter().zip(is_test) {
        if t {
            test.push(item.clone());
        } else {
            train.push(item.clone());
        }
    }
    Ok((train, test))
}

/// Splits whole profiles so no test profile leaks into training.
pub fn split_by_profile(
    records: &[DatasetRecord],
    cfg: &SplitConfig,
) -> Result<(Vec<DatasetRecord>, Vec<DatasetRecord>)> {
    let groups: Vec<Vec<DatasetRecord>> = group_by_profile(records)
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let (train, test) = split(&groups, cfg)?;
    Ok((train.concat(), test.concat()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub request: PredictionRequest,
    pub optimal: CodeParams,
    pub prediction: PredictionResult,
    /// Oracle rate at the rounded prediction.
    pub dler: f64,
    /// `dler - target`.
    pub delta: f64,
    pub latency_ms: f64,
}

impl CaseOutcome {
    pub fn achieved(&self) -> bool {
        meets_target(self.dler, self.request.target_logical_error_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub optimal_distance: u32,
    pub predicted_distance: u32,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mean_ms: f64,
    pub std_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cases: usize,
    pub pearson_raw_distance: Option<f64>,
    pub pearson_rounded_distance: Option<f64>,
    pub pearson_raw_rounds: Option<f64>,
    pub pearson_rounded_rounds: Option<f64>,
    pub achievement_fraction: f64,
    /// 95th percentile of `delta / target` over cases that missed the target.
    pub missed_relative_delta_p95: Option<f64>,
    pub dler_source: String,
    pub dler_tler_deltas: Vec<f64>,
    pub heatmap: Vec<HeatCell>,
    #[serde(skip)]
    pub outcomes: Vec<CaseOutcome>,
    /// Wall-clock figures; excluded from reproducibility comparisons.
    pub timing: Timing,
}

impl EvalReport {
    /// The report minus timing, for reproducibility checks.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        v.to_string()
    }
}

fn nearest_rank(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

fn mean_std(xs: &[f64]) -> Timing {
    if xs.is_empty() {
        return Timing {
            mean_ms: 0.0,
            std_ms: 0.0,
        };
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Timing {
        mean_ms: mean,
        std_ms: var.sqrt(),
    }
}

fn pearson_opt(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    match pearson(x, y) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs `model` on every labelled test case and scores it.
pub fn evaluate(
    model: &dyn Recommender,
    test: &[LabeledExample],
    oracle: &OracleConfig,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let outcomes = test
        .par_iter()
        .map(|ex| {
            let start = Instant::now();
            let prediction = model.recommend(&ex.request)?;
            let latency_ms = start.elapsed().as_secs_f64() * 1e3;
            let p = prediction.params();
            let dler = logical_error_rate(p.distance, p.rounds, &ex.request.noise, oracle)?;
            Ok(CaseOutcome {
                request: ex.request,
                optimal: ex.optimal,
                prediction,
                dler,
                delta: dler - ex.request.target_logical_error_rate,
                latency_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(outcomes))
}

pub fn summarize(outcomes: Vec<CaseOutcome>) -> EvalReport {
    let col = |f: &dyn Fn(&CaseOutcome) -> f64| outcomes.iter().map(f).collect::<Vec<f64>>();
    let opt_d = col(&|o| o.optimal.distance as f64);
    let opt_r = col(&|o| o.optimal.rounds as f64);
    let pearson_for = |pred: Vec<f64>, truth: &[f64]| pearson_opt(&pred, truth).ok().flatten();
    let n = outcomes.len();

    let deltas = col(&|o| o.delta);
    let achieved = outcomes.iter().filter(|o| o.achieved()).count();
    let mut missed: Vec<f64> = outcomes
        .iter()
        .filter(|o| !o.achieved())
        .map(|o| o.delta / o.request.target_logical_error_rate)
        .collect();
    missed.sort_by(f64::total_cmp);

    let mut cells: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for o in &outcomes {
        *cells
            .entry((o.optimal.distance, o.prediction.rounded_distance))
            .or_default() += 1;
    }

    EvalReport {
        cases: n,
        pearson_raw_distance: pearson_for(col(&|o| o.prediction.raw_distance), &opt_d),
        pearson_rounded_distance: pearson_for(
            col(&|o| o.prediction.rounded_distance as f64),
            &opt_d,
        ),
        pearson_raw_rounds: pearson_for(col(&|o| o.prediction.raw_rounds), &opt_r),
        pearson_rounded_rounds: pearson_for(col(&|o| o.prediction.rounded_rounds as f64), &opt_r),
        achievement_fraction: if n == 0 {
            0.0
        } else {
            achieved as f64 / n as f64
        },
        missed_relative_delta_p95: nearest_rank(&missed, 0.95),
        dler_source: "synthetic-oracle".into(),
        dler_tler_deltas: deltas,
        heatmap: cells
            .into_iter()
            .map(|((o, p), count)| HeatCell {
                optimal_distance: o,
                predicted_distance: p,
                count,
            })
            .collect(),
        timing: mean_std(&col(&|o| o.latency_ms)),
        outcomes,
    }
}

/// Bin edges for the relative-delta histogram. Bins are `(lo, hi]`, the
/// first one closed on the left.
pub const RELATIVE_DELTA_EDGES: [f64; 11] = [
    -1.0,
    -0.99,
    -0.9,
    -0.5,
    0.0,
    0.5,
    1.0,
    2.0,
    5.0,
    10.0,
    f64::INFINITY,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

pub fn histogram(values: &[f64], edges: &[f64]) -> Vec<Bin> {
    let mut bins: Vec<Bin> = edges
        .windows(2)
        .map(|w| Bin {
            lo: w[0],
            hi: w[1],
            count: 0,
        })
        .collect();
    for &v in values {
        if let Some(b) = bins
            .iter_mut()
            .enumerate()
            .find(|(i, b)| (v > b.lo || (*i == 0 && v == b.lo)) && v <= b.hi)
            .map(|(_, b)| b)
        {
            b.count += 1;
        }
    }
    bins
}

/// Relative deltas `(DLER - TLER) / TLER` binned for plotting.
pub fn delta_histogram(report: &EvalReport) -> Vec<Bin> {
    let rel: Vec<f64> = report
        .outcomes
        .iter()
        .map(|o| o.delta / o.request.target_logical_error_rate)
        .collect();
    histogram(&rel, &RELATIVE_DELTA_EDGES)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: String,
    pub pearson_distance: Option<f64>,
    pub pearson_rounds: Option<f64>,
    pub achievement_fraction: f64,
}

/// Trains every spec on `train` and scores it on `test`. Rows are sorted
/// by distance Pearson, best first; undefined scores sort last.
pub fn compare_models(
    specs: &[ModelSpec],
    train: &[LabeledExample],
    test: &[LabeledExample],
    settings: &TrainSettings,
    oracle: &OracleConfig,
) -> Result<Vec<ComparisonRow>> {
    if specs.len() < 2 {
        return Err(Error::invalid("compare", "need at least two models"));
    }
    let mut rows = specs
        .iter()
        .map(|spec| {
            let model = spec.fit(train, settings)?;
            let report = evaluate(&model, test, oracle)?;
            Ok(ComparisonRow {
                model: spec.to_string(),
                pearson_distance: report.pearson_raw_distance,
                pearson_rounds: report.pearson_raw_rounds,
                achievement_fraction: report.achievement_fraction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        let key = |r: &ComparisonRow| r.pearson_distance.unwrap_or(f64::NEG_INFINITY);
        key(b).total_cmp(&key(a))
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::NoiseProfile;
    use proptest::prelude::*;

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        let v = pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
        assert!((v - 9.0 / 84f64.sqrt()).abs() < 1e-12);
        assert!((v - 0.981981).abs() < 1e-5, "{v}");
    }

    #[test]
    fn pearson_errors() {
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::Undefined(_))
        ));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let items: Vec<u32> = (0..10).collect();
        let cfg = SplitConfig::default();
        let (train, test) = split(&items, &cfg).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(split(&items, &cfg).unwrap(), (train.clone(), test.clone()));
        let mut all: Vec<u32> = train.into_iter().chain(test).collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert!(split(&items[..4], &cfg).is_err());
        assert!(split(
            &items,
            &SplitConfig {
                test_fraction: 1.0,
                seed: 1
            }
        )
        .is_err());
    }

    #[test]
    fn histogram_bins_are_left_open() {
        let bins = histogram(&[-1.0, 0.0, 0.2, 50.0], &RELATIVE_DELTA_EDGES);
        assert_eq!(bins[0].count, 1);
        let zero_bin = bins.iter().find(|b| b.hi == 0.0).unwrap();
        assert_eq!(zero_bin.count, 1);
        assert_eq!(bins.last().unwrap().count, 1);
        assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 4);
    }

    #[test]
    fn perfect_outcomes_summarize_to_unit_pearson() {
        let noise = NoiseProfile::new(1e-4, 1e-3, 1e-4, 1e-3).unwrap();
        let outcomes: Vec<CaseOutcome> = [(3u32, 2u32), (5, 5), (9, 8), (11, 11)]
            .iter()
            .map(|&(d, r)| CaseOutcome {
                request: PredictionRequest::new(noise, 1e-5).unwrap(),
                optimal: CodeParams {
                    distance: d,
                    rounds: r,
                },
                prediction: PredictionResult::from_raw(d as f64, r as f64).unwrap(),
                dler: 1e-6,
                delta: 1e-6 - 1e-5,
                latency_ms: 0.01,
            })
            .collect();
        let rep = summarize(outcomes);
        assert!((rep.pearson_raw_distance.unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.pearson_rounded_rounds.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rep.achievement_fraction, 1.0);
        assert_eq!(rep.missed_relative_delta_p95, None);
        assert_eq!(rep.heatmap.len(), 4);
    }

    proptest! {
        #[test]
        fn pearson_is_symmetric_and_affine_invariant(
            pts in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
            a in 0.1f64..10.0, b in -50.0f64..50.0,
        ) {
            let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
            if let (Ok(r), Ok(s)) = (pearson(&x, &y), pearson(&y, &x)) {
                prop_assert!((r - s).abs() < 1e-12);
                let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                prop_assert!((pearson(&xs, &y).unwrap() - r).abs() < 1e-9);
            }
        }

        #[test]
        fn achievement_matches_deltas(deltas in proptest::collection::vec(-1e-5f64..1e-5, 1..30)) {
            let noise = NoiseProfile::new(1e-4, 1e-3, 1e-4, 1e-3).unwrap();
            let outcomes: Vec<CaseOutcome> = deltas.iter().enumerate().map(|(i, &d)| CaseOutcome {
                request: PredictionRequest::new(noise, 1e-4).unwrap(),
                optimal: CodeParams { distance: 3 + 2 * (i as u32 % 5), rounds: 3 },
                prediction: PredictionResult::from_raw(3.0, 3.0).unwrap(),
                dler: 1e-4 + d,
                delta: d,
                latency_ms: 0.0,
            }).collect();
            let rep = summarize(outcomes);
            let expect = deltas.iter().filter(|d| meets_target(1e-4 + **d, 1e-4)).count() as f64 / deltas.len() as f64;
            prop_assert_eq!(rep.achievement_fraction, expect);
        }
    }
}

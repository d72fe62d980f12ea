//! Instance-based baselines: nearest neighbour, 1-D linear and quadratic
//! interpolation, and inverse-distance weighting. Each comes in a weighted
//! variant (the profile folded into one scalar) and a non-weighted variant
//! (all four rates as separate features), and all of them run the same
//! two-stage strategy as the learned pipeline: distance first, then rounds
//! from the rounded distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{
    floor_raw, round_distance, scalarize, DatasetRecord, HeuristicWeights, PredictionRequest,
    PredictionResult,
};
use crate::error::{Error, Result};
use crate::labels::{build_labels, LabeledExample};
use crate::ml::Standardization;

pub const IDW_NEIGHBORS: usize = 8;
pub const IDW_POWER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RangeSearch,
    LinearInterp,
    PolyInterp,
    MultivariateInterp,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::RangeSearch,
        Method::LinearInterp,
        Method::PolyInterp,
        Method::MultivariateInterp,
    ];

    fn as_str(self) -> &'static str {
        match self {
            Method::RangeSearch => "range_search",
            Method::LinearInterp => "linear_interp",
            Method::PolyInterp => "poly_interp",
            Method::MultivariateInterp => "multivariate_interp",
        }
    }
}

/// A method plus the feature variant, written `<method>_w` or `<method>_n_w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HeuristicKind {
    pub method: Method,
    pub weighted: bool,
}

impl HeuristicKind {
    pub fn all() -> Vec<HeuristicKind> {
        Method::ALL
            .iter()
            .flat_map(|&method| [true, false].map(|weighted| HeuristicKind { method, weighted }))
            .collect()
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = if self.weighted { "w" } else { "n_w" };
        write!(f, "{}_{}", self.method.as_str(), suffix)
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, weighted) = if let Some(b) = s.strip_suffix("_n_w") {
            (b, false)
        } else if let Some(b) = s.strip_suffix("_w") {
            (b, true)
        } else {
            return Err(Error::invalid(
                "heuristic",
                format!("unknown heuristic `{s}`"),
            ));
        };
        let method = Method::ALL
            .into_iter()
            .find(|m| m.as_str() == base)
            .ok_or_else(|| Error::invalid("heuristic", format!("unknown heuristic `{s}`")))?;
        Ok(HeuristicKind { method, weighted })
    }
}

impl TryFrom<String> for HeuristicKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<HeuristicKind> for String {
    fn from(k: HeuristicKind) -> String {
        k.to_string()
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn check_dims(train: &[(Vec<f64>, f64)], query: &[f64]) -> Result<()> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if let Some((row, _)) = train.iter().find(|(row, _)| row.len() != query.len()) {
        return Err(Error::SchemaMismatch {
            expected: row.len(),
            got: query.len(),
        });
    }
    Ok(())
}

/// Label of the nearest training point; the lowest index wins ties.
pub fn range_search(train: &[(Vec<f64>, f64)], query: &[f64]) -> Result<f64> {
    check_dims(train, query)?;
    let mut best = (f64::INFINITY, 0.0);
    for (row, label) in train {
        let d = euclidean(row, query);
        if d < best.0 {
            best = (d, *label);
        }
    }
    Ok(best.1)
}

/// Indices ordered by `|x_i - x|`, then by index.
fn nearest_1d(train: &[(f64, f64)], x: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..train.len()).collect();
    idx.sort_by(|&a, &b| (train[a].0 - x).abs().total_cmp(&(train[b].0 - x).abs()));
    idx
}

fn line_through(p1: (f64, f64), p2: (f64, f64), x: f64) -> Result<f64> {
    let ((x1, y1), (x2, y2)) = (p1, p2);
    if x1 == x2 {
        return Err(Error::DegenerateAbscissa(x1));
    }
    Ok(y1 + (x - x1) * (y2 - y1) / (x2 - x1))
}

/// Straight line through the two training points nearest to `x`,
/// extrapolating outside their span.
pub fn linear_interp(train: &[(f64, f64)], x: f64) -> Result<f64> {
    if train.len() < 2 {
        return Err(Error::invalid(
            "training set",
            "linear interpolation needs 2 points",
        ));
    }
    let near = nearest_1d(train, x);
    line_through(train[near[0]], train[near[1]], x)
}

/// Quadratic through the three nearest points. Repeated abscissae make the
/// fit singular; then the two nearest points with distinct abscissae are
/// joined by a line instead.
pub fn poly_interp(train: &[(f64, f64)], x: f64) -> Result<f64> {
    let near = nearest_1d(train, x);
    if near.len() >= 3 {
        let [a, b, c] = [train[near[0]], train[near[1]], train[near[2]]];
        if a.0 != b.0 && a.0 != c.0 && b.0 != c.0 {
            let term = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
                p.1 * (x - q.0) * (x - r.0) / ((p.0 - q.0) * (p.0 - r.0))
            };
            return Ok(term(a, b, c) + term(b, a, c) + term(c, a, b));
        }
    }
    let mut distinct: Vec<(f64, f64)> = Vec::with_capacity(2);
    for &i in &near {
        if distinct.iter().all(|p| p.0 != train[i].0) {
            distinct.push(train[i]);
            if distinct.len() == 2 {
                return line_through(distinct[0], distinct[1], x);
            }
        }
    }
    Err(Error::invalid(
        "training set",
        "fewer than 2 points with distinct abscissae",
    ))
}

/// Inverse-distance weighted mean of the `k` nearest labels. A query that
/// coincides with a training point returns that point's label.
pub fn multivariate_interp(
    train: &[(Vec<f64>, f64)],
    query: &[f64],
    k: usize,
    power: f64,
) -> Result<f64> {
    check_dims(train, query)?;
    let mut by_dist: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, (row, _))| (euclidean(row, query), i))
        .collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if by_dist[0].0 == 0.0 {
        return Ok(train[by_dist[0].1].1);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(d, i) in by_dist.iter().take(k.max(1)) {
        let w = d.powf(-power);
        num += w * train[i].1;
        den += w;
    }
    Ok(num / den)
}

/// Instance-based two-stage predictor. Training examples are kept verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicModel {
    pub kind: HeuristicKind,
    pub weights: HeuristicWeights,
    pub examples: Vec<LabeledExample>,
    pub stage1_scaling: Standardization,
    pub stage2_scaling: Standardization,
    pub max_distance: u32,
}

impl HeuristicModel {
    pub fn fit(
        kind: HeuristicKind,
        examples: Vec<LabeledExample>,
        weights: HeuristicWeights,
    ) -> Result<Self> {
        let weights = weights.validate()?;
        if examples.is_empty() {
            return Err(Error::Empty("labelled training examples"));
        }
        let s1: Vec<Vec<f64>> = examples
            .iter()
            .map(|e| stage1_row(kind, &weights, &e.request))
            .collect();
        let s2: Vec<Vec<f64>> = examples
            .iter()
            .map(|e| vec![e.optimal.distance as f64, e.request.log_target()])
            .collect();
        let max_distance = examples
            .iter()
            .map(|e| e.optimal.distance)
            .max()
            .unwrap_or(3);
        Ok(HeuristicModel {
            kind,
            weights,
            stage1_scaling: Standardization::fit(&s1),
            stage2_scaling: Standardization::fit(&s2),
            examples,
            max_distance,
        })
    }

    pub fn from_records(
        kind: HeuristicKind,
        records: &[DatasetRecord],
        targets: &[f64],
        weights: HeuristicWeights,
    ) -> Result<Self> {
        Self::fit(kind, build_labels(records, targets)?, weights)
    }

    pub fn predict(&self, req: &PredictionRequest) -> Result<PredictionResult> {
        let raw_distance = floor_raw(self.stage1(req)?, "raw distance")?;
        let rounded = round_distance(raw_distance)?;
        let raw_rounds = floor_raw(self.stage2(rounded, req.log_target())?, "raw rounds")?;
        PredictionResult::from_raw(raw_distance, raw_rounds)
    }

    fn stage1(&self, req: &PredictionRequest) -> Result<f64> {
        match self.kind.method {
            Method::RangeSearch | Method::MultivariateInterp => {
                let train: Vec<(Vec<f64>, f64)> = self
                    .examples
                    .iter()
                    .map(|e| {
                        let row = stage1_row(self.kind, &self.weights, &e.request);
                        (self.stage1_scaling.apply(&row), e.optimal.distance as f64)
                    })
                    .collect();
                let q = self
                    .stage1_scaling
                    .apply(&stage1_row(self.kind, &self.weights, req));
                self.nd(&train, &q)
            }
            Method::LinearInterp | Method::PolyInterp => {
                let decade = self.nearest_decade(req.log_target());
                let pairs: Vec<(f64, f64)> = self
                    .examples
                    .iter()
                    .filter(|e| e.request.log_target() == decade)
                    .map(|e| (self.axis(&e.request), e.optimal.distance as f64))
                    .collect();
                self.one_d(pairs, self.axis(req))
            }
        }
    }

    fn stage2(&self, distance: u32, log_target: f64) -> Result<f64> {
        match self.kind.method {
            Method::RangeSearch | Method::MultivariateInterp => {
                let train: Vec<(Vec<f64>, f64)> = self
                    .examples
                    .iter()
                    .map(|e| {
                        let row = [e.optimal.distance as f64, e.request.log_target()];
                        (self.stage2_scaling.apply(&row), e.optimal.rounds as f64)
                    })
                    .collect();
                let q = self.stage2_scaling.apply(&[distance as f64, log_target]);
                self.nd(&train, &q)
            }
            Method::LinearInterp | Method::PolyInterp => {
                let decade = self.nearest_decade(log_target);
                let pairs: Vec<(f64, f64)> = self
                    .examples
                    .iter()
                    .filter(|e| e.request.log_target() == decade)
                    .map(|e| (e.optimal.distance as f64, e.optimal.rounds as f64))
                    .collect();
                self.one_d(pairs, distance as f64)
            }
        }
    }

    fn nd(&self, train: &[(Vec<f64>, f64)], q: &[f64]) -> Result<f64> {
        match self.kind.method {
            Method::RangeSearch => range_search(train, q),
            _ => multivariate_interp(train, q, IDW_NEIGHBORS, IDW_POWER),
        }
    }

    fn one_d(&self, pairs: Vec<(f64, f64)>, x: f64) -> Result<f64> {
        let pts = mean_by_abscissa(pairs);
        match (pts.len(), self.kind.method) {
            (0, _) => Err(Error::Empty("training set")),
            (1, _) => Ok(pts[0].1),
            (2, _) | (_, Method::LinearInterp) => linear_interp(&pts, x),
            _ => poly_interp(&pts, x),
        }
    }

    /// The 1-D abscissa: weighted error or the norm of the rate vector.
    fn axis(&self, req: &PredictionRequest) -> f64 {
        if self.kind.weighted {
            scalarize(&req.noise, &self.weights)
        } else {
            req.noise.norm()
        }
    }

    /// Closest training target in log space; the smaller wins ties.
    fn nearest_decade(&self, log_target: f64) -> f64 {
        let mut best = f64::NAN;
        for e in &self.examples {
            let lt = e.request.log_target();
            let closer = (lt - log_target).abs() < (best - log_target).abs()
                || ((lt - log_target).abs() == (best - log_target).abs() && lt < best);
            if best.is_nan() || closer {
                best = lt;
            }
        }
        best
    }
}

fn stage1_row(kind: HeuristicKind, w: &HeuristicWeights, req: &PredictionRequest) -> Vec<f64> {
    if kind.weighted {
        vec![scalarize(&req.noise, w), req.log_target()]
    } else {
        let p = req.noise;
        vec![p.depolarizing, p.gate, p.reset, p.readout, req.log_target()]
    }
}

/// Sorted by abscissa, duplicate abscissae replaced by their mean label.
fn mean_by_abscissa(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (x, y) in pairs {
        match out.last_mut() {
            Some(last) if last.0 == x => {
                last.1 += y;
                last.2 += 1;
            }
            _ => out.push((x, y, 1)),
        }
    }
    out.into_iter().map(|(x, s, n)| (x, s / n as f64)).collect()
}

/// Fit-and-predict in one call.
pub fn heuristic_predict(
    kind: HeuristicKind,
    train: &[DatasetRecord],
    targets: &[f64],
    weights: HeuristicWeights,
    req: &PredictionRequest,
) -> Result<PredictionResult> {
    HeuristicModel::from_records(kind, train, targets, weights)?.predict(req)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{CodeParams, NoiseProfile};
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<(f64, f64)> {
        v.to_vec()
    }

    #[test]
    fn kinds_round_trip_through_names() {
        let all = HeuristicKind::all();
        assert_eq!(all.len(), 8);
        for k in all {
            assert_eq!(k.to_string().parse::<HeuristicKind>().unwrap(), k);
        }
        assert_eq!(
            "range_search_w".parse::<HeuristicKind>().unwrap(),
            HeuristicKind {
                method: Method::RangeSearch,
                weighted: true
            }
        );
        assert!("range_search".parse::<HeuristicKind>().is_err());
        assert!("bogus_w".parse::<HeuristicKind>().is_err());
    }

    #[test]
    fn range_search_examples() {
        let train = vec![(vec![0.0], 1.0), (vec![10.0], 9.0)];
        assert_eq!(range_search(&train, &[10.0]).unwrap(), 9.0);
        assert_eq!(range_search(&train, &[2.0]).unwrap(), 1.0);
        let tie = vec![(vec![0.0], 1.0), (vec![4.0], 9.0)];
        assert_eq!(range_search(&tie, &[2.0]).unwrap(), 1.0);
        assert!(matches!(range_search(&[], &[1.0]), Err(Error::Empty(_))));
    }

    #[test]
    fn linear_examples() {
        let t = pts(&[(0.0, 0.0), (2.0, 4.0)]);
        assert_eq!(linear_interp(&t, 1.0).unwrap(), 2.0);
        assert_eq!(linear_interp(&t, 3.0).unwrap(), 6.0);
        assert!(matches!(
            linear_interp(&pts(&[(1.0, 5.0), (1.0, 7.0)]), 1.0),
            Err(Error::DegenerateAbscissa(_))
        ));
    }

    #[test]
    fn poly_examples() {
        let sq = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
        assert!((poly_interp(&sq, 1.5).unwrap() - 2.25).abs() < 1e-12);
        let line = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!((poly_interp(&line, 5.0).unwrap() - 5.0).abs() < 1e-12);
        // Repeated abscissa: falls back to the line through (0,0) and (2,4).
        let rep = pts(&[(0.0, 0.0), (0.0, 1.0), (2.0, 4.0)]);
        let got = poly_interp(&rep, 1.0).unwrap();
        assert_eq!(
            got,
            linear_interp(&pts(&[(0.0, 0.0), (2.0, 4.0)]), 1.0).unwrap()
        );
        assert_eq!(got, 2.0);
        assert!(poly_interp(&pts(&[(1.0, 1.0), (1.0, 2.0)]), 0.0).is_err());
        assert!(poly_interp(&pts(&[(1.0, 1.0)]), 0.0).is_err());
    }

    #[test]
    fn idw_examples() {
        let train = vec![(vec![0.0, 0.0], 3.0), (vec![2.0, 0.0], 5.0)];
        assert_eq!(
            multivariate_interp(&train, &[0.0, 0.0], 8, 2.0).unwrap(),
            3.0
        );
        assert_eq!(
            multivariate_interp(&train, &[1.0, 0.0], 8, 2.0).unwrap(),
            4.0
        );
        let train = vec![(vec![1.0], 0.0), (vec![-2.0], 6.0)];
        let v = multivariate_interp(&train, &[0.0], 8, 2.0).unwrap();
        assert!((v - 1.2).abs() < 1e-12, "{v}");
    }

    fn ex(gate: f64, target: f64, d: u32, r: u32) -> LabeledExample {
        LabeledExample {
            request: PredictionRequest::new(
                NoiseProfile::new(1e-4, gate, 1e-4, 1e-3).unwrap(),
                target,
            )
            .unwrap(),
            optimal: CodeParams {
                distance: d,
                rounds: r,
            },
        }
    }

    fn small_set() -> Vec<LabeledExample> {
        vec![
            ex(1e-3, 1e-4, 5, 4),
            ex(2e-3, 1e-4, 7, 6),
            ex(4e-3, 1e-4, 9, 9),
            ex(1e-3, 1e-6, 9, 8),
            ex(2e-3, 1e-6, 11, 11),
            ex(4e-3, 1e-6, 15, 14),
        ]
    }

    #[test]
    fn exact_match_propagates_through_range_search() {
        for weighted in [true, false] {
            let kind = HeuristicKind {
                method: Method::RangeSearch,
                weighted,
            };
            let m = HeuristicModel::fit(kind, small_set(), HeuristicWeights::default()).unwrap();
            for e in small_set() {
                assert_eq!(m.predict(&e.request).unwrap().params(), e.optimal, "{kind}");
            }
        }
    }

    #[test]
    fn linear_weighted_two_stage_hand_trace() {
        let kind = HeuristicKind {
            method: Method::LinearInterp,
            weighted: true,
        };
        let w = HeuristicWeights::default();
        let m = HeuristicModel::fit(kind, small_set(), w).unwrap();
        // Query between the 1e-3 and 2e-3 gate profiles, target 2e-6 snaps to
        // the 1e-6 decade.
        let req =
            PredictionRequest::new(NoiseProfile::new(1e-4, 1.5e-3, 1e-4, 1e-3).unwrap(), 2e-6)
                .unwrap();
        let x = |g: f64| 0.4 * g + 0.3 * 1e-4 + 0.2 * 1e-3 + 0.1 * 1e-4;
        let (x1, x2, xq) = (x(1e-3), x(2e-3), x(1.5e-3));
        // Two nearest are the 1e-3 (d=9) and 2e-3 (d=11) profiles.
        let raw_d = 9.0 + (xq - x1) * (11.0 - 9.0) / (x2 - x1);
        let out = m.predict(&req).unwrap();
        assert!(
            (out.raw_distance - raw_d).abs() < 1e-9,
            "{} vs {raw_d}",
            out.raw_distance
        );
        assert_eq!(out.rounded_distance, 11);
        // Stage 2 at d=11 in the 1e-6 decade: abscissae {9, 11, 15}, nearest 11 then 9.
        let raw_r = 11.0 + (11.0 - 11.0) * (8.0 - 11.0) / (9.0 - 11.0);
        assert_eq!(out.raw_rounds, raw_r);
        assert_eq!(out.rounded_rounds, 11);
    }

    #[test]
    fn every_variant_yields_valid_results() {
        let set = small_set();
        for kind in HeuristicKind::all() {
            let m = HeuristicModel::fit(kind, set.clone(), HeuristicWeights::default()).unwrap();
            for t in [1e-3, 1e-5, 1e-9] {
                let req =
                    PredictionRequest::new(NoiseProfile::new(3e-4, 8e-3, 2e-4, 2e-2).unwrap(), t)
                        .unwrap();
                let out = m.predict(&req).unwrap();
                assert_eq!(out.rounded_distance % 2, 1);
                assert!(out.rounded_distance >= 3);
                assert!(out.rounded_distance as f64 >= out.raw_distance);
                assert_eq!(out.rounded_rounds as f64, out.raw_rounds.ceil().max(1.0));
            }
        }
    }

    #[test]
    fn empty_training_is_rejected() {
        let kind = HeuristicKind::all()[0];
        assert!(HeuristicModel::fit(kind, vec![], HeuristicWeights::default()).is_err());
    }

    proptest! {
        #[test]
        fn range_search_returns_a_training_label(
            pts in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0, 0u8..20), 1..30),
            q in (-12.0f64..12.0, -12.0f64..12.0),
        ) {
            let train: Vec<(Vec<f64>, f64)> = pts.iter().map(|p| (vec![p.0, p.1], p.2 as f64)).collect();
            let got = range_search(&train, &[q.0, q.1]).unwrap();
            prop_assert!(train.iter().any(|t| t.1 == got));
        }

        #[test]
        fn idw_is_a_convex_combination(
            pts in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -5.0f64..5.0), 1..30),
            q in (-12.0f64..12.0, -12.0f64..12.0),
        ) {
            let train: Vec<(Vec<f64>, f64)> = pts.iter().map(|p| (vec![p.0, p.1], p.2)).collect();
            let got = multivariate_interp(&train, &[q.0, q.1], IDW_NEIGHBORS, IDW_POWER).unwrap();
            let mut by: Vec<(f64, usize)> = train.iter().enumerate()
                .map(|(i, t)| (euclidean(&t.0, &[q.0, q.1]), i)).collect();
            by.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let labels: Vec<f64> = by.iter().take(IDW_NEIGHBORS).map(|&(_, i)| train[i].1).collect();
            let lo = labels.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = labels.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(got >= lo - 1e-9 && got <= hi + 1e-9);
        }

        #[test]
        fn linear_reproduces_training_labels(
            xs in proptest::collection::btree_set(-1000i32..1000, 2..20),
            seed in 0u64..1000,
        ) {
            let train: Vec<(f64, f64)> = xs.iter()
                .map(|&x| (x as f64, ((x as u64).wrapping_mul(seed + 7) % 97) as f64))
                .collect();
            for &(x, y) in &train {
                prop_assert!((linear_interp(&train, x).unwrap() - y).abs() < 1e-9);
            }
        }

        #[test]
        fn poly_on_collinear_points_equals_linear(
            a in -5.0f64..5.0, b in -5.0f64..5.0,
            x0 in -10.0f64..10.0, gap1 in 0.1f64..5.0, gap2 in 0.1f64..5.0,
            q in -20.0f64..20.0,
        ) {
            let xs = [x0, x0 + gap1, x0 + gap1 + gap2];
            let train: Vec<(f64, f64)> = xs.iter().map(|&x| (x, a * x + b)).collect();
            let p = poly_interp(&train, q).unwrap();
            let l = linear_interp(&train, q).unwrap();
            prop_assert!((p - l).abs() <= 1e-7 * (1.0 + l.abs()), "{} vs {}", p, l);
        }
    }
}

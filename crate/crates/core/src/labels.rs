//! Turning forward experiments `(noise, d, r) -> rate` into inverse
//! training examples `(noise, target) -> optimal (d, r)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::{CodeParams, DatasetRecord, NoiseProfile, PredictionRequest};
use crate::error::{Error, Result};
use crate::oracle::meets_target;

/// Targets each profile is labelled at.
pub const TARGET_MENU: [f64; 6] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];

pub const STAGE1_SCHEMA: [&str; 5] = ["depolarizing", "gate", "reset", "readout", "log10_target"];
pub const STAGE2_SCHEMA: [&str; 2] = ["distance", "log10_target"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub request: PredictionRequest,
    pub optimal: CodeParams,
}

pub fn stage1_features(req: &PredictionRequest) -> Vec<f64> {
    let p = req.noise;
    vec![p.depolarizing, p.gate, p.reset, p.readout, req.log_target()]
}

pub fn stage2_features(distance: u32, log_target: f64) -> Vec<f64> {
    vec![distance as f64, log_target]
}

/// Records grouped by exact profile, in order of first appearance.
pub fn group_by_profile(records: &[DatasetRecord]) -> Vec<(NoiseProfile, Vec<DatasetRecord>)> {
    let mut slot: HashMap<[u64; 4], usize> = HashMap::new();
    let mut groups: Vec<(NoiseProfile, Vec<DatasetRecord>)> = Vec::new();
    for rec in records {
        let i = *slot.entry(rec.noise.key()).or_insert_with(|| {
            groups.push((rec.noise, Vec::new()));
            groups.len() - 1
        });
        groups[i].1.push(*rec);
    }
    groups
}

/// For every profile and target, the lexicographically smallest recorded
/// `(d, r)` whose rate is at most the target. Unreachable pairs are
/// dropped.
pub fn build_labels(records: &[DatasetRecord], targets: &[f64]) -> Result<Vec<LabeledExample>> {
    if records.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let mut out = Vec::new();
    for (noise, recs) in group_by_profile(records) {
        for &t in targets {
            let request = PredictionRequest::new(noise, t)?;
            let best = recs
                .iter()
                .filter(|r| meets_target(r.logical_error_rate, t))
                .map(|r| r.params)
                .min();
            if let Some(optimal) = best {
                out.push(LabeledExample { request, optimal });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{find_optimal_params, generate_dataset, OracleConfig, SweepConfig};

    #[test]
    fn labels_match_brute_force_search_on_generated_data() {
        let sweep = SweepConfig {
            profiles_per_run: 6,
            ..SweepConfig::default()
        };
        let cfg = OracleConfig::default();
        let records = generate_dataset(&sweep, &cfg).unwrap();
        let labels = build_labels(&records, &TARGET_MENU).unwrap();
        assert!(!labels.is_empty());
        for ex in &labels {
            let truth = find_optimal_params(&ex.request, &sweep, &cfg).unwrap();
            assert_eq!(truth, Some(ex.optimal));
        }
        // Dropped pairs are exactly the infeasible ones.
        let groups = group_by_profile(&records);
        let feasible = groups
            .iter()
            .flat_map(|(p, _)| {
                TARGET_MENU
                    .iter()
                    .map(move |&t| PredictionRequest::new(*p, t).unwrap())
            })
            .filter(|req| find_optimal_params(req, &sweep, &cfg).unwrap().is_some())
            .count();
        assert_eq!(feasible, labels.len());
    }

    #[test]
    fn grouping_keeps_first_appearance_order() {
        let p = |g| NoiseProfile {
            depolarizing: 1e-4,
            gate: g,
            reset: 0.0,
            readout: 0.0,
        };
        let rec = |g, d, r| DatasetRecord {
            noise: p(g),
            params: CodeParams {
                distance: d,
                rounds: r,
            },
            logical_error_rate: 1e-3,
        };
        let recs = [rec(2e-3, 3, 1), rec(1e-3, 3, 1), rec(2e-3, 3, 2)];
        let groups = group_by_profile(&recs);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0.gate, 2e-3);
        assert_eq!(groups[0].1.len(), 2);
    }
}

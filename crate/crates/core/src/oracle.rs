//! Synthetic logical-error-rate model, the dataset sweep built on it, and a
//! brute-force search for the cheapest code parameters meeting a target.
//!
//! The model follows the usual below-threshold suppression law
//! `A * (p / p_th)^((d + 1) / 2)` with two changes: the exponent uses
//! `min(d, r)` so too few rounds cap the protection, and a penalty linear
//! in `r - d` and in the depolarizing rate makes long runs degrade again.

use log::warn;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{validate_profile, CodeParams, DatasetRecord, NoiseProfile, PredictionRequest};
use crate::error::{Error, Result};

/// How the four error rates combine into one effective rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationWeights {
    pub gate: f64,
    pub depolarizing: f64,
    pub readout: f64,
    pub reset: f64,
}

impl Default for CombinationWeights {
    fn default() -> Self {
        CombinationWeights {
            gate: 0.5,
            depolarizing: 0.3,
            readout: 0.15,
            reset: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub amplitude: f64,
    pub threshold: f64,
    pub weights: CombinationWeights,
    /// Strength of the per-extra-round decoherence penalty.
    pub decoherence: f64,
    pub floor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            amplitude: 0.1,
            threshold: 0.01,
            weights: CombinationWeights::default(),
            decoherence: 1.0,
            floor: 1e-15,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid("oracle.threshold", "must be in (0, 1)"));
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return Err(Error::invalid("oracle.amplitude", "must be in (0, 1]"));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::invalid("oracle.floor", "must be in (0, 1)"));
        }
        if !(self.decoherence >= 0.0 && self.decoherence.is_finite()) {
            return Err(Error::invalid(
                "oracle.decoherence",
                "must be finite and >= 0",
            ));
        }
        let w = self.weights;
        if [w.gate, w.depolarizing, w.readout, w.reset]
            .iter()
            .any(|c| !(c.is_finite() && *c >= 0.0))
        {
            return Err(Error::invalid("oracle.weights", "must be finite and >= 0"));
        }
        Ok(())
    }
}

pub fn effective_error(p: &NoiseProfile, cfg: &OracleConfig) -> f64 {
    let w = &cfg.weights;
    w.gate * p.gate + w.depolarizing * p.depolarizing + w.readout * p.readout + w.reset * p.reset
}

/// Logical error rate of a distance-`d` rotated code run for `r` rounds.
pub fn logical_error_rate(d: u32, r: u32, p: &NoiseProfile, cfg: &OracleConfig) -> Result<f64> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::invalid(
            "distance",
            format!("{d} is not an odd integer >= 3"),
        ));
    }
    if r < 1 {
        return Err(Error::invalid("rounds", "must be at least 1"));
    }
    let p_eff = effective_error(p, cfg);
    if p_eff >= cfg.threshold {
        return Err(Error::AboveThreshold {
            effective: p_eff,
            threshold: cfg.threshold,
        });
    }
    Ok(ler_unchecked(d, r, p, p_eff, cfg))
}

fn ler_unchecked(d: u32, r: u32, p: &NoiseProfile, p_eff: f64, cfg: &OracleConfig) -> f64 {
    let exponent = (d.min(r) as f64 + 1.0) / 2.0;
    let suppression = cfg.amplitude * (p_eff / cfg.threshold).powf(exponent);
    let extra_rounds = r.saturating_sub(d) as f64;
    let penalty = 1.0 + cfg.decoherence * extra_rounds * (p.depolarizing / cfg.threshold);
    (suppression * penalty).clamp(cfg.floor, 1.0)
}

/// Closed interval a sampled rate is drawn from, uniformly.
pub type RateRange = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRanges {
    pub depolarizing: RateRange,
    pub gate: RateRange,
    pub reset: RateRange,
    pub readout: RateRange,
}

impl Default for ProfileRanges {
    fn default() -> Self {
        ProfileRanges {
            depolarizing: [1e-4, 4e-4],
            gate: [5e-4, 1.6e-3],
            reset: [1e-4, 5e-4],
            readout: [1e-3, 3e-3],
        }
    }
}

impl ProfileRanges {
    /// A degenerate range set that always yields `p`.
    pub fn fixed(p: NoiseProfile) -> Self {
        ProfileRanges {
            depolarizing: [p.depolarizing; 2],
            gate: [p.gate; 2],
            reset: [p.reset; 2],
            readout: [p.readout; 2],
        }
    }

    fn named(&self) -> [(&'static str, RateRange); 4] {
        [
            ("sweep.ranges.depolarizing", self.depolarizing),
            ("sweep.ranges.gate", self.gate),
            ("sweep.ranges.reset", self.reset),
            ("sweep.ranges.readout", self.readout),
        ]
    }

    fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in self.named() {
            if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi >= 1.0 {
                return Err(Error::invalid(name, "bounds must lie in [0, 1)"));
            }
            if lo > hi {
                return Err(Error::invalid(name, format!("inverted range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> NoiseProfile {
        let mut draw = |[lo, hi]: RateRange| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..=hi)
            }
        };
        NoiseProfile {
            depolarizing: draw(self.depolarizing),
            gate: draw(self.gate),
            reset: draw(self.reset),
            readout: draw(self.readout),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Odd, strictly increasing.
    pub distances: Vec<u32>,
    pub rounds_min: u32,
    pub rounds_max: u32,
    /// Once a distance produces a rate at or below this, larger distances
    /// are skipped for the current profile.
    pub termination_rate: f64,
    pub ranges: ProfileRanges,
    pub profiles_per_run: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            distances: (3..=19).step_by(2).collect(),
            rounds_min: 1,
            rounds_max: 60,
            termination_rate: 1e-9,
            ranges: ProfileRanges::default(),
            profiles_per_run: 22,
            seed: 42,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.distances.is_empty() {
            return Err(Error::Empty("distance list"));
        }
        if self.distances.iter().any(|&d| d < 3 || d % 2 == 0) {
            return Err(Error::invalid(
                "sweep.distances",
                "must be odd integers >= 3",
            ));
        }
        if self.distances.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "sweep.distances",
                "must be strictly increasing",
            ));
        }
        if self.rounds_min < 1 || self.rounds_min > self.rounds_max {
            return Err(Error::invalid(
                "sweep.rounds",
                format!(
                    "need 1 <= rounds_min <= rounds_max, got {}..{}",
                    self.rounds_min, self.rounds_max
                ),
            ));
        }
        if !(self.termination_rate > 0.0 && self.termination_rate < 1.0) {
            return Err(Error::invalid(
                "sweep.termination_rate",
                "must be in (0, 1)",
            ));
        }
        self.ranges.validate()
    }

    pub fn rounds(&self) -> std::ops::RangeInclusive<u32> {
        self.rounds_min..=self.rounds_max
    }

    /// Draws `profiles_per_run` profiles from the configured ranges.
    pub fn sample_profiles(&self) -> Result<Vec<NoiseProfile>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.profiles_per_run)
            .map(|_| self.ranges.sample(&mut rng))
            .collect())
    }
}

/// Samples profiles per `sweep` and runs [`sweep_profiles`] on them.
pub fn generate_dataset(sweep: &SweepConfig, cfg: &OracleConfig) -> Result<Vec<DatasetRecord>> {
    cfg.validate()?;
    let profiles = sweep.sample_profiles()?;
    sweep_profiles(&profiles, sweep, cfg)
}

/// Sweeps distances in ascending order and every round count for each
/// profile. Output is ordered by (profile index, distance, rounds).
/// Profiles that are invalid or above threshold are skipped with a warning.
pub fn sweep_profiles(
    profiles: &[NoiseProfile],
    sweep: &SweepConfig,
    cfg: &OracleConfig,
) -> Result<Vec<DatasetRecord>> {
    sweep.validate()?;
    cfg.validate()?;
    let per_profile: Vec<Vec<DatasetRecord>> = profiles
        .par_iter()
        .enumerate()
        .map(|(idx, p)| sweep_one(idx, p, sweep, cfg))
        .collect();
    Ok(per_profile.into_iter().flatten().collect())
}

fn sweep_one(
    idx: usize,
    p: &NoiseProfile,
    sweep: &SweepConfig,
    cfg: &OracleConfig,
) -> Vec<DatasetRecord> {
    if let Err(e) = validate_profile(*p) {
        warn!("skipping profile {idx}: {e}");
        return Vec::new();
    }
    let p_eff = effective_error(p, cfg);
    if p_eff >= cfg.threshold {
        warn!(
            "skipping profile {idx}: effective error {p_eff:e} is at or above threshold {:e}",
            cfg.threshold
        );
        return Vec::new();
    }
    let mut out = Vec::new();
    for &d in &sweep.distances {
        let mut reached = false;
        for r in sweep.rounds() {
            let ler = ler_unchecked(d, r, p, p_eff, cfg);
            reached |= meets_target(ler, sweep.termination_rate);
            out.push(DatasetRecord {
                noise: *p,
                params: CodeParams {
                    distance: d,
                    rounds: r,
                },
                logical_error_rate: ler,
            });
        }
        if reached {
            break;
        }
    }
    out
}

/// Relative slack when comparing a logical error rate against a target, so
/// values that agree to the last few ulps count as meeting it.
pub const TARGET_RTOL: f64 = 1e-12;

pub fn meets_target(ler: f64, target: f64) -> bool {
    ler <= target * (1.0 + TARGET_RTOL)
}

/// Lexicographically smallest `(d, r)` on the sweep grid whose logical
/// error rate is at most the target. `Ok(None)` when nothing qualifies.
pub fn find_optimal_params(
    req: &PredictionRequest,
    sweep: &SweepConfig,
    cfg: &OracleConfig,
) -> Result<Option<CodeParams>> {
    sweep.validate()?;
    cfg.validate()?;
    let p = &req.noise;
    let p_eff = effective_error(p, cfg);
    if p_eff >= cfg.threshold {
        return Err(Error::AboveThreshold {
            effective: p_eff,
            threshold: cfg.threshold,
        });
    }
    for &d in &sweep.distances {
        for r in sweep.rounds() {
            if meets_target(
                ler_unchecked(d, r, p, p_eff, cfg),
                req.target_logical_error_rate,
            ) {
                return Ok(Some(CodeParams {
                    distance: d,
                    rounds: r,
                }));
            }
        }
    }
    Ok(None)
}

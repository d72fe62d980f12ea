//! Domain types shared by every other module: noise profiles, code
//! parameters, dataset records, prediction requests and results, plus the
//! rounding rules that turn raw regressor output into usable parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Device-level physical error rates. All four are dimensionless
/// probabilities in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub depolarizing: f64,
    pub gate: f64,
    pub reset: f64,
    pub readout: f64,
}

impl NoiseProfile {
    /// Field order used by feature vectors and the dataset CSV.
    pub const FIELD_NAMES: [&'static str; 4] = ["depolarizing", "gate", "reset", "readout"];

    pub fn new(depolarizing: f64, gate: f64, reset: f64, readout: f64) -> Result<Self> {
        validate_profile(NoiseProfile {
            depolarizing,
            gate,
            reset,
            readout,
        })
    }

    /// `[depolarizing, gate, reset, readout]`
    pub fn as_array(&self) -> [f64; 4] {
        [self.depolarizing, self.gate, self.reset, self.readout]
    }

    pub fn scaled(&self, factor: f64) -> NoiseProfile {
        NoiseProfile {
            depolarizing: self.depolarizing * factor,
            gate: self.gate * factor,
            reset: self.reset * factor,
            readout: self.readout * factor,
        }
    }

    /// Euclidean norm of the four rates.
    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Bit-exact identity key, used to group dataset records by profile.
    pub(crate) fn key(&self) -> [u64; 4] {
        self.as_array().map(f64::to_bits)
    }
}

/// Checks every field is finite and in `[0, 1)` and that the profile is not
/// all zero. Returns the profile unchanged on success.
pub fn validate_profile(p: NoiseProfile) -> Result<NoiseProfile> {
    for (name, value) in NoiseProfile::FIELD_NAMES.iter().zip(p.as_array()) {
        if !value.is_finite() || !(0.0..1.0).contains(&value) {
            return Err(Error::InvalidInput {
                field: name,
                reason: format!("{value} is outside [0, 1)"),
            });
        }
    }
    if p.as_array().iter().all(|&v| v == 0.0) {
        return Err(Error::AllZeroProfile);
    }
    Ok(p)
}

/// Surface code distance and number of syndrome rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub distance: u32,
    pub rounds: u32,
}

impl CodeParams {
    pub fn new(distance: u32, rounds: u32) -> Result<Self> {
        if distance < 3 || distance.is_multiple_of(2) {
            return Err(Error::invalid(
                "distance",
                format!("{distance} is not an odd integer >= 3"),
            ));
        }
        if rounds < 1 {
            return Err(Error::invalid("rounds", "must be at least 1"));
        }
        Ok(CodeParams { distance, rounds })
    }

    /// Data qubits of a rotated code, `d^2`.
    pub fn data_qubits(&self) -> u64 {
        let d = self.distance as u64;
        d * d
    }

    /// Data plus measurement qubits, `2d^2 - 1`.
    pub fn total_qubits(&self) -> u64 {
        2 * self.data_qubits() - 1
    }
}

/// One forward experiment: `(noise, d, r) -> logical error rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub noise: NoiseProfile,
    pub params: CodeParams,
    pub logical_error_rate: f64,
}

impl DatasetRecord {
    pub fn new(noise: NoiseProfile, params: CodeParams, logical_error_rate: f64) -> Result<Self> {
        let noise = validate_profile(noise)?;
        let params = CodeParams::new(params.distance, params.rounds)?;
        if !logical_error_rate.is_finite() || logical_error_rate <= 0.0 || logical_error_rate > 1.0
        {
            return Err(Error::invalid(
                "logical_error_rate",
                format!("{logical_error_rate} is outside (0, 1]"),
            ));
        }
        Ok(DatasetRecord {
            noise,
            params,
            logical_error_rate,
        })
    }
}

/// The inverse query: a device profile and the logical error rate it must reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRequest {
    pub noise: NoiseProfile,
    pub target_logical_error_rate: f64,
}

impl PredictionRequest {
    pub fn new(noise: NoiseProfile, target_logical_error_rate: f64) -> Result<Self> {
        let noise = validate_profile(noise)?;
        let t = target_logical_error_rate;
        if !t.is_finite() || t <= 0.0 || t >= 1.0 {
            return Err(Error::invalid("target", format!("{t} is outside (0, 1)")));
        }
        Ok(PredictionRequest {
            noise,
            target_logical_error_rate: t,
        })
    }

    pub fn log_target(&self) -> f64 {
        self.target_logical_error_rate.log10()
    }
}

/// Raw regressor output together with the parameters it rounds to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub raw_distance: f64,
    pub rounded_distance: u32,
    pub raw_rounds: f64,
    pub rounded_rounds: u32,
}

impl PredictionResult {
    pub fn from_raw(raw_distance: f64, raw_rounds: f64) -> Result<Self> {
        Ok(PredictionResult {
            raw_distance,
            rounded_distance: round_distance(raw_distance)?,
            raw_rounds,
            rounded_rounds: round_rounds(raw_rounds)?,
        })
    }

    pub fn params(&self) -> CodeParams {
        CodeParams {
            distance: self.rounded_distance,
            rounds: self.rounded_rounds,
        }
    }
}

/// Regressors can extrapolate below any meaningful parameter value; raw
/// outputs are floored at 1 before rounding.
pub fn floor_raw(raw: f64, field: &'static str) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::invalid(
            field,
            format!("raw prediction {raw} is not finite"),
        ));
    }
    Ok(raw.max(1.0))
}

fn check_raw(raw: f64, field: &'static str) -> Result<()> {
    if !raw.is_finite() || raw <= 0.0 {
        return Err(Error::invalid(
            field,
            format!("{raw} must be finite and positive"),
        ));
    }
    Ok(())
}

/// Smallest odd integer `>= max(raw, 3)`.
pub fn round_distance(raw: f64) -> Result<u32> {
    check_raw(raw, "raw distance")?;
    let up = raw.max(3.0).ceil();
    if up > u32::MAX as f64 - 1.0 {
        return Err(Error::invalid(
            "raw distance",
            format!("{raw} is too large"),
        ));
    }
    let up = up as u32;
    Ok(if up.is_multiple_of(2) { up + 1 } else { up })
}

/// `ceil(raw)`, floored at 1.
pub fn round_rounds(raw: f64) -> Result<u32> {
    check_raw(raw, "raw rounds")?;
    let up = raw.ceil().max(1.0);
    if up > u32::MAX as f64 {
        return Err(Error::invalid("raw rounds", format!("{raw} is too large")));
    }
    Ok(up as u32)
}

/// Per-error-type importance weights for the weighted heuristics.
/// Must be non-negative, sum to one and be ordered gate > depolarizing >
/// readout > reset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicWeights {
    pub gate: f64,
    pub depolarizing: f64,
    pub readout: f64,
    pub reset: f64,
}

impl Default for HeuristicWeights {
    fn default() -> Self {
        HeuristicWeights {
            gate: 0.4,
            depolarizing: 0.3,
            readout: 0.2,
            reset: 0.1,
        }
    }
}

impl HeuristicWeights {
    pub fn new(gate: f64, depolarizing: f64, readout: f64, reset: f64) -> Result<Self> {
        HeuristicWeights {
            gate,
            depolarizing,
            readout,
            reset,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self> {
        let all = [self.gate, self.depolarizing, self.readout, self.reset];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights", "must be finite and non-negative"));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "weights",
                format!("sum to {sum}, expected 1"),
            ));
        }
        if !(self.gate > self.depolarizing
            && self.depolarizing > self.readout
            && self.readout > self.reset)
        {
            return Err(Error::invalid(
                "weights",
                "must be ordered gate > depolarizing > readout > reset",
            ));
        }
        Ok(self)
    }
}

/// Folds a profile into one weighted error rate.
pub fn scalarize(p: &NoiseProfile, w: &HeuristicWeights) -> f64 {
    w.gate * p.gate + w.depolarizing * p.depolarizing + w.readout * p.readout + w.reset * p.reset
}

//! Device calibration snapshots: a flat JSON object
//! `{"device", "timestamp", "depolarizing", "gate", "reset", "readout"}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::NoiseProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSnapshot {
    pub device: String,
    pub timestamp: String,
    pub depolarizing: f64,
    pub gate: f64,
    pub reset: f64,
    pub readout: f64,
}

impl CalibrationSnapshot {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("calibration", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn profile(&self) -> Result<NoiseProfile> {
        NoiseProfile::new(self.depolarizing, self.gate, self.reset, self.readout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_onto_a_profile() {
        let snap = CalibrationSnapshot::parse(
            r#"{"device":"dev","timestamp":"2024-01-01T00:00:00Z",
                "depolarizing":2.4e-4,"gate":7.7e-3,"reset":1e-3,"readout":2.5e-2}"#,
        )
        .unwrap();
        assert_eq!(
            snap.profile().unwrap(),
            NoiseProfile::new(2.4e-4, 7.7e-3, 1e-3, 2.5e-2).unwrap()
        );
    }

    #[test]
    fn rejects_extra_missing_and_out_of_range() {
        let base = r#""device":"d","timestamp":"t","depolarizing":1e-4,"gate":1e-3,"reset":1e-4"#;
        assert!(CalibrationSnapshot::parse(&format!("{{{base}}}")).is_err());
        assert!(
            CalibrationSnapshot::parse(&format!("{{{base},\"readout\":1e-3,\"t1\":5}}")).is_err()
        );
        let bad = CalibrationSnapshot::parse(&format!("{{{base},\"readout\":1.5}}")).unwrap();
        assert!(bad.profile().is_err());
    }
}

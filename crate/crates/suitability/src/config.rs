//! Engine configuration.
//!
//! Every assessing node carries an [`EngineConfig`] controlling the
//! requirement weight `tau`, the priority ceiling `p_max`, the four
//! history weights `delta`, the salt weight, the proximity normalizer
//! bounds, and the seed for all randomness.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exclusive lower bound for `tau`: below or at one half, later
/// requirements would outweigh earlier ones.
pub const TAU_MIN: f64 = 0.5;
/// Exclusive upper bound for `tau`: at one, only the first requirement
/// would ever count.
pub const TAU_MAX: f64 = 1.0;
/// Exclusive upper bound for the salt weight (below 1%).
pub const SALT_WEIGHT_MAX: f64 = 0.01;
/// Tolerance for the delta-weight sum check.
pub const DELTA_SUM_TOLERANCE: f64 = 1e-12;

/// Upper bounds used to map raw proximity measurements onto [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProximityMaxima {
    /// Hop count at which the hop sub-grade bottoms out.
    pub hop_max: f64,
    /// Round-trip time, in seconds, at which the RTT sub-grade bottoms out.
    pub rtt_max: f64,
    /// Packet delay variation, in seconds, at which the PDV sub-grade
    /// bottoms out.
    pub pdv_max: f64,
}

impl Default for ProximityMaxima {
    fn default() -> Self {
        Self {
            hop_max: 32.0,
            rtt_max: 1.0,
            pdv_max: 0.1,
        }
    }
}

/// Per-node assessment parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Requirement weight in (0.5, 1.0): how strongly earlier requirements
    /// dominate later ones.
    pub tau: f64,
    /// Highest admissible request priority.
    pub p_max: u8,
    /// Weights of the four historical-performance metrics; must sum to 1.
    pub delta: [f64; 4],
    /// Weight of the tie-breaking salt inside the history criterion.
    pub salt_weight: f64,
    /// Normalizer bounds for the proximity sub-grades.
    pub proximity_maxima: ProximityMaxima,
    /// Seed for every random draw made on behalf of this node.
    pub rng_seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            tau: 0.66,
            p_max: 7,
            delta: [0.25, 0.25, 0.25, 0.25],
            salt_weight: 1e-10,
            proximity_maxima: ProximityMaxima::default(),
            rng_seed: 42,
        }
    }
}

impl EngineConfig {
    /// Checks the parameter ranges that the assessment math relies on.
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > TAU_MIN && self.tau < TAU_MAX) {
            return Err(Error::TauOutOfRange(self.tau));
        }
        let sum: f64 = self.delta.iter().sum();
        if (sum - 1.0).abs() > DELTA_SUM_TOLERANCE || self.delta.iter().any(|d| *d < 0.0) {
            return Err(Error::DeltaSumInvalid(self.delta));
        }
        if !(self.salt_weight >= 0.0 && self.salt_weight < SALT_WEIGHT_MAX) {
            return Err(Error::SaltWeightOutOfRange(self.salt_weight));
        }
        let maxima = [
            ("hop_max", self.proximity_maxima.hop_max),
            ("rtt_max", self.proximity_maxima.rtt_max),
            ("pdv_max", self.proximity_maxima.pdv_max),
        ];
        for (field, value) in maxima {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::ProximityMaximumInvalid { field, value });
            }
        }
        Ok(())
    }

    /// Parses a config from JSON. Missing fields fall back to defaults;
    /// the result is validated.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Loads and validates a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

//! Admission requests: an ordered requirement list and a priority.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One requested resource item.
///
/// `kind` keys into the resource registry (`"cpu.cores"`, `"mem.bytes"`,
/// `"net.bandwidth_bps"`, `"tsn.tas"`, or anything registered by the
/// caller). `amount` is expressed in the kind's native unit. Complex kinds
/// take extra scalars through `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    pub kind: String,
    pub amount: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Requirement {
    pub fn new(kind: impl Into<String>, amount: f64) -> Self {
        Self {
            kind: kind.into(),
            amount,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.is_empty() {
            return Err(Error::EmptyKind);
        }
        if !(self.amount.is_finite() && self.amount >= 0.0) {
            return Err(Error::InvalidAmount(self.amount));
        }
        Ok(())
    }
}

/// The unit of negotiation: an ordered requirement list plus a priority.
///
/// Index 0 of `requirements` is the most relevant item; the order is
/// preserved exactly as received and drives the weight each item gets
/// during assessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionRequest {
    pub requirements: Vec<Requirement>,
    pub priority: u8,
    pub talker: String,
    pub listener: String,
    pub request_id: String,
}

impl AdmissionRequest {
    pub fn new(
        requirements: Vec<Requirement>,
        priority: u8,
        talker: impl Into<String>,
        listener: impl Into<String>,
        request_id: impl Into<String>,
    ) -> Self {
        Self {
            requirements,
            priority,
            talker: talker.into(),
            listener: listener.into(),
            request_id: request_id.into(),
        }
    }

    /// Validates the list shape and the priority bound against `p_max`.
    pub fn validate(&self, p_max: u8) -> Result<()> {
        if self.requirements.is_empty() {
            return Err(Error::EmptyRequirements);
        }
        for requirement in &self.requirements {
            requirement.validate()?;
        }
        if self.priority > p_max {
            return Err(Error::PriorityOutOfRange {
                priority: self.priority,
                p_max,
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

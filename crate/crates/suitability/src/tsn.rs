//! Time-aware-shaper assessment.
//!
//! A shaped interface carries a gate-control schedule: traffic classes
//! with a gate-open duration and the occupancy entries of already
//! admitted flows. Fitting a new flow costs its transmission time plus a
//! guard, and the effort of fitting it into a class is graded piecewise:
//! classes with room grade in (0.5, 1], classes that would need their
//! gate widened grade below 0.5, so a feasible class always outranks an
//! infeasible one.
//!
//! Schedule durations are kept in milliseconds, matching the wire format;
//! [`transmission_time`] returns seconds and callers bridge at the edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resources::{NetworkInterface, NodeState};

/// Default guard as a fraction of the transmission time.
pub const DEFAULT_GUARD_FRACTION: f64 = 0.1;

/// Largest grade an infeasible class may receive: one ULP below 0.5, so
/// the infeasible branch can never reach the feasible band.
pub const INFEASIBLE_CEIL: f64 = 0.5 - f64::EPSILON / 2.0;

/// A service flow to be fitted into a traffic class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceFlow {
    /// Message size in bits.
    pub data_size_bits: f64,
    /// Guard time as a fraction of the transmission time.
    pub guard_fraction: f64,
    /// Index of the traffic class chosen for this flow, when one has been
    /// picked; class selection itself is up to the caller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assigned_class: Option<usize>,
}

impl ServiceFlow {
    pub fn new(data_size_bits: f64) -> Self {
        Self {
            data_size_bits,
            guard_fraction: DEFAULT_GUARD_FRACTION,
            assigned_class: None,
        }
    }

    pub fn with_guard_fraction(mut self, guard_fraction: f64) -> Self {
        self.guard_fraction = guard_fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.data_size_bits > 0.0 && self.data_size_bits.is_finite()) {
            return Err(Error::InvalidDataSize(self.data_size_bits));
        }
        if self.guard_fraction < 0.0 {
            return Err(Error::InvalidGuardFraction(self.guard_fraction));
        }
        Ok(())
    }
}

/// One occupancy entry inside a traffic class: an admitted flow's
/// transmission time, or its guard listed as its own line item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmittedFlow {
    pub label: String,
    pub t_tx_ms: f64,
}

/// A traffic class from the gate-control list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficClass {
    pub class_id: String,
    /// Gate-open duration per cycle, milliseconds.
    pub t_open_ms: f64,
    #[serde(default)]
    pub flows: Vec<AdmittedFlow>,
}

impl TrafficClass {
    pub fn new(class_id: impl Into<String>, t_open_ms: f64) -> Self {
        Self {
            class_id: class_id.into(),
            t_open_ms,
            flows: Vec::new(),
        }
    }

    pub fn occupied_ms(&self) -> f64 {
        self.flows.iter().map(|flow| flow.t_tx_ms).sum()
    }
}

/// The per-interface gate-control schedule.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TasSchedule {
    pub classes: Vec<TrafficClass>,
}

impl TasSchedule {
    pub fn new(classes: Vec<TrafficClass>) -> Self {
        Self { classes }
    }

    pub fn class(&self, class_id: &str) -> Result<&TrafficClass> {
        self.classes
            .iter()
            .find(|class| class.class_id == class_id)
            .ok_or_else(|| Error::UnknownTrafficClass(class_id.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for class in &self.classes {
            if class.t_open_ms.is_nan() || class.t_open_ms <= 0.0 {
                return Err(Error::NonPositiveOpenTime {
                    class_id: class.class_id.clone(),
                    t_open_ms: class.t_open_ms,
                });
            }
            let occupied = class.occupied_ms();
            if occupied > class.t_open_ms {
                return Err(Error::OverCommittedClass {
                    class_id: class.class_id.clone(),
                    occupied_ms: occupied,
                    t_open_ms: class.t_open_ms,
                });
            }
        }
        Ok(())
    }

    /// Books a flow into a class: the transmission time and its guard are
    /// recorded as separate occupancy entries. Fails if the class would
    /// end up over-committed.
    pub fn admit(
        &mut self,
        class_id: &str,
        label: &str,
        t_tx_ms: f64,
        t_guard_ms: f64,
    ) -> Result<()> {
        let class = self
            .classes
            .iter_mut()
            .find(|class| class.class_id == class_id)
            .ok_or_else(|| Error::UnknownTrafficClass(class_id.to_string()))?;
        let after = class.occupied_ms() + t_tx_ms + t_guard_ms;
        if after > class.t_open_ms {
            return Err(Error::OverCommittedClass {
                class_id: class.class_id.clone(),
                occupied_ms: after,
                t_open_ms: class.t_open_ms,
            });
        }
        class.flows.push(AdmittedFlow {
            label: label.to_string(),
            t_tx_ms,
        });
        if t_guard_ms > 0.0 {
            class.flows.push(AdmittedFlow {
                label: format!("{label}.guard"),
                t_tx_ms: t_guard_ms,
            });
        }
        Ok(())
    }
}

/// Transmission time of a data flow, in seconds: `data_size / bandwidth`.
pub fn transmission_time(data_size_bits: f64, bandwidth_bps: f64) -> Result<f64> {
    if bandwidth_bps.is_nan() || bandwidth_bps <= 0.0 {
        return Err(Error::InvalidBandwidth(bandwidth_bps));
    }
    Ok(data_size_bits / bandwidth_bps)
}

/// Transmission time plus guard: `t_tx * (1 + guard_fraction)`. Unit
/// agnostic: the result is in whatever unit `t_tx` is.
pub fn needed_time(t_tx: f64, guard_fraction: f64) -> f64 {
    t_tx * (1.0 + guard_fraction)
}

/// Remaining gate-open time of a class after its admitted occupancy
/// entries (guards included, as listed), in milliseconds.
pub fn free_time(class: &TrafficClass) -> f64 {
    class.t_open_ms - class.occupied_ms()
}

/// The piecewise effort grade for fitting a demand of `t_needed` into
/// `t_free` (same unit, conventionally milliseconds).
///
/// With room to spare (`t_free >= t_needed`) the grade is
/// `0.5 + (t_needed / t_free) / 2`, approaching 1 as the class fills
/// tightly. Without room it is `(t_needed / t_free - 1) / 2`, capped just
/// below 0.5 so an infeasible class can never outrank a feasible one.
pub fn effort_grade(t_needed: f64, t_free: f64) -> f64 {
    if t_free <= 0.0 {
        return 0.0;
    }
    let x = t_needed / t_free;
    if t_free >= t_needed {
        0.5 + x / 2.0
    } else {
        ((x - 1.0) / 2.0).min(INFEASIBLE_CEIL)
    }
}

/// Grades the effort of fitting `flow` into `class` over `interface`.
pub fn tas_capability(
    flow: &ServiceFlow,
    class: &TrafficClass,
    interface: &NetworkInterface,
) -> Result<f64> {
    flow.validate()?;
    let t_tx_ms = transmission_time(flow.data_size_bits, interface.bandwidth_bps)? * 1e3;
    let t_needed_ms = needed_time(t_tx_ms, flow.guard_fraction);
    Ok(effort_grade(t_needed_ms, free_time(class)))
}

/// Whether the node can run a time-aware shaper at all: at least one
/// interface must carry a configured schedule.
pub fn tas_bare_metal(node: &NodeState) -> bool {
    node.interfaces
        .iter()
        .any(|interface| interface.tas.as_ref().is_some_and(|t| !t.classes.is_empty()))
}

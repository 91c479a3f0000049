//! The five assessment criteria and their combination.
//!
//! A node grades an admission request against five normalized criteria:
//!
//! 1. bare-metal resources — can the node's *total* capacities ever host
//!    the request (binary);
//! 2. current resources — the order-weighted recursion over the
//!    per-requirement grades;
//! 3. priority — an affine map of the request priority onto (0, 1];
//! 4. proximity — the mean of normalized network-condition sub-grades
//!    toward the listener;
//! 5. historical performance — a weighted sum of four log-derived metrics
//!    plus a tiny salt used to break ties between nodes.
//!
//! [`combine`] multiplies the first three and averages the last two:
//!
//! ```text
//! B = c1 * c2 * c3 * (c4 + c5) / 2
//! ```
//!
//! so a zero in any of the input-driven criteria annihilates the grade,
//! while the two environment-driven criteria soften each other.

use rand_core::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{EngineConfig, TAU_MAX, TAU_MIN};
use crate::error::{Error, Result};
use crate::request::AdmissionRequest;
use crate::resources::{NodeState, ResourceRegistry};

/// Network conditions measured from the assessing node toward a listener.
///
/// Samples are injected by the caller (or synthesized by the simulator);
/// this crate does no probing of its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximitySample {
    /// Network hops toward the listener.
    pub hops: u32,
    /// Round-trip time, seconds.
    pub rtt: f64,
    /// Packet-loss fraction in [0, 1].
    pub loss: f64,
    /// Packet delay variation, seconds.
    pub pdv: f64,
    /// Listener this sample was measured toward.
    pub toward: String,
}

impl ProximitySample {
    /// A perfect-connectivity sample: every sub-grade is 1.
    pub fn perfect(toward: impl Into<String>) -> Self {
        Self {
            hops: 0,
            rtt: 0.0,
            loss: 0.0,
            pdv: 0.0,
            toward: toward.into(),
        }
    }
}

/// The four historical-performance metrics, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HistoryMetrics {
    /// Similarity of the current requirement count to the historical mean.
    pub rh1: f64,
    /// Share of granted reservations that went unused.
    pub rh2: f64,
    /// Stability of the available capacity over time.
    pub rh3: f64,
    /// Share of grants that were strict reservations.
    pub rh4: f64,
}

impl HistoryMetrics {
    pub const ZERO: Self = Self {
        rh1: 0.0,
        rh2: 0.0,
        rh3: 0.0,
        rh4: 0.0,
    };
}

/// Outcome of the bare-metal criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BareMetal {
    Pass,
    /// The first requirement whose bare-metal check failed.
    Fail { kind: String },
}

impl BareMetal {
    pub fn grade(&self) -> u8 {
        match self {
            BareMetal::Pass => 1,
            BareMetal::Fail { .. } => 0,
        }
    }
}

fn check_range(criterion: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if !(value >= min && value <= max) {
        return Err(Error::CriterionOutOfRange { criterion, value });
    }
    Ok(())
}

/// Combines the five criterion grades into the suitability value.
///
/// Returns `bare_metal * current * priority_grade * (proximity + history) / 2`.
/// The product of values in [0, 1] needs no clamping. Out-of-range inputs
/// are contract violations named after the offending criterion.
pub fn combine(
    bare_metal: u8,
    current: f64,
    priority_grade: f64,
    proximity: f64,
    history: f64,
) -> Result<f64> {
    if bare_metal > 1 {
        return Err(Error::CriterionOutOfRange {
            criterion: "bare_metal",
            value: f64::from(bare_metal),
        });
    }
    check_range("current_resources", current, 0.0, 1.0)?;
    check_range("priority_grade", priority_grade, 0.0, 1.0)?;
    if priority_grade == 0.0 {
        return Err(Error::CriterionOutOfRange {
            criterion: "priority_grade",
            value: priority_grade,
        });
    }
    check_range("proximity", proximity, 0.0, 1.0)?;
    check_range("history", history, 0.0, 1.0)?;
    Ok(f64::from(bare_metal) * current * priority_grade * ((proximity + history) / 2.0))
}

/// Bare-metal criterion: 1 iff every requirement's bare-metal check passes
/// against the node's *total* capacities.
///
/// Requirements are checked in list order and the first failure
/// short-circuits: nothing past it is evaluated. An unregistered kind is
/// an error, not a zero grade.
pub fn assess_bare_metal(
    request: &AdmissionRequest,
    node: &NodeState,
    registry: &ResourceRegistry,
) -> Result<BareMetal> {
    for requirement in &request.requirements {
        let descriptor = registry.get(&requirement.kind)?;
        if !descriptor.check_bare_metal(requirement, node) {
            return Ok(BareMetal::Fail {
                kind: requirement.kind.clone(),
            });
        }
    }
    Ok(BareMetal::Pass)
}

/// Current-resources criterion over the ordered per-requirement grades.
///
/// A single grade is returned as-is. Longer lists are folded by the
/// recursion `tau * rho_0 + (1 - tau) * f(rest)`, so the i-th grade
/// carries weight `tau * (1 - tau)^i` and the last one `(1 - tau)^(n-1)`.
/// Any grade of exactly zero annihilates the whole criterion before the
/// recursion runs.
pub fn assess_current(rhos: &[f64], tau: f64) -> Result<f64> {
    if rhos.is_empty() {
        return Err(Error::EmptyRequirements);
    }
    if !(tau > TAU_MIN && tau < TAU_MAX) {
        return Err(Error::TauOutOfRange(tau));
    }
    for &rho in rhos {
        check_range("rho", rho, 0.0, 1.0)?;
    }
    if rhos.contains(&0.0) {
        return Ok(0.0);
    }
    Ok(weighted(rhos, tau))
}

fn weighted(rhos: &[f64], tau: f64) -> f64 {
    match rhos {
        [only] => *only,
        [head, tail @ ..] => tau * head + (1.0 - tau) * weighted(tail, tau),
        [] => unreachable!("assess_current rejects empty lists"),
    }
}

/// Priority criterion: `(priority + 1) / (p_max + 1)`.
///
/// Strictly positive by construction and exactly 1 at the maximum
/// priority.
pub fn grade_priority(priority: u8, p_max: u8) -> Result<f64> {
    if priority > p_max {
        return Err(Error::PriorityOutOfRange { priority, p_max });
    }
    Ok((f64::from(priority) + 1.0) / (f64::from(p_max) + 1.0))
}

fn clamp01(value: f64) -> f64 {
    value.clamp(0.0, 1.0)
}

/// Proximity criterion: the arithmetic mean of four normalized
/// sub-grades, one per measured network condition.
///
/// Each sub-grade decreases linearly from 1 (ideal) to 0 at the
/// configured normalizer bound.
pub fn assess_proximity(sample: &ProximitySample, config: &EngineConfig) -> f64 {
    let maxima = &config.proximity_maxima;
    let f_hops = clamp01(1.0 - f64::from(sample.hops) / maxima.hop_max);
    let f_rtt = clamp01(1.0 - sample.rtt / maxima.rtt_max);
    let f_loss = clamp01(1.0 - sample.loss);
    let f_pdv = clamp01(1.0 - sample.pdv / maxima.pdv_max);
    (f_hops + f_rtt + f_loss + f_pdv) / 4.0
}

/// Historical-performance criterion:
/// `(1 - salt_weight) * (delta . metrics) + salt_weight * salt`.
///
/// The salt perturbs the criterion by at most `salt_weight`, enough to
/// break ties between otherwise identical assessments without moving the
/// order of magnitude of the grade.
pub fn assess_history(metrics: &HistoryMetrics, salt: f64, config: &EngineConfig) -> Result<f64> {
    let sum: f64 = config.delta.iter().sum();
    if (sum - 1.0).abs() > crate::config::DELTA_SUM_TOLERANCE {
        return Err(Error::DeltaSumInvalid(config.delta));
    }
    check_range("salt", salt, 0.0, 1.0)?;
    for value in [metrics.rh1, metrics.rh2, metrics.rh3, metrics.rh4] {
        check_range("history_metric", value, 0.0, 1.0)?;
    }
    let [d1, d2, d3, d4] = config.delta;
    let weighted = d1 * metrics.rh1 + d2 * metrics.rh2 + d3 * metrics.rh3 + d4 * metrics.rh4;
    Ok((1.0 - config.salt_weight) * weighted + config.salt_weight * salt)
}

/// Draws a uniform salt in [0, 1) from the given generator.
///
/// Deterministic under a fixed seed and draw sequence; 53 bits of
/// precision.
pub fn draw_salt<R: Rng>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

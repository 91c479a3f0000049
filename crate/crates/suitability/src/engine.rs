//! Full assessment of an admission request against a node.
//!
//! Ties the criteria together: the bare-metal gate short-circuits, the
//! per-requirement grades are collected in list order (stopping at the
//! first zero), and the five criterion grades are combined into the
//! suitability value. The whole breakdown is kept for explainability even
//! though only the scalar suitability travels between nodes.

use rand_core::Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{self, BareMetal, HistoryMetrics, ProximitySample};
use crate::error::Result;
use crate::history;
use crate::request::AdmissionRequest;
use crate::resources::{NodeState, ResourceRegistry};

/// Grade of a single requirement, in assessment order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementGrade {
    pub kind: String,
    pub rho: f64,
}

/// The five criterion grades and the combined suitability value.
///
/// When the bare-metal gate fails, grading stops: every later criterion
/// reads zero, `per_requirement` stays empty, and `failed_kind` names the
/// requirement that could never be hosted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityBreakdown {
    pub bare_metal: u8,
    pub current_resources: f64,
    pub priority_grade: f64,
    pub proximity: f64,
    pub history: f64,
    pub suitability: f64,
    pub per_requirement: Vec<RequirementGrade>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_kind: Option<String>,
}

impl SuitabilityBreakdown {
    fn bare_metal_failure(kind: String) -> Self {
        Self {
            bare_metal: 0,
            current_resources: 0.0,
            priority_grade: 0.0,
            proximity: 0.0,
            history: 0.0,
            suitability: 0.0,
            per_requirement: Vec::new(),
            failed_kind: Some(kind),
        }
    }
}

/// Assesses a request against a node, deriving the history grade from the
/// node's log and taking the salt from the caller.
///
/// The proximity sample is injected: measuring the network is outside
/// this crate. Draw the salt once per assessment, e.g. with
/// [`criteria::draw_salt`].
pub fn assess(
    request: &AdmissionRequest,
    node: &NodeState,
    registry: &ResourceRegistry,
    proximity: &ProximitySample,
    salt: f64,
) -> Result<SuitabilityBreakdown> {
    let proximity_grade = criteria::assess_proximity(proximity, &node.config);
    let metrics = history::compute_metrics(&node.history, request, &node.totals);
    let history_grade = criteria::assess_history(&metrics, salt, &node.config)?;
    assess_graded(request, node, registry, proximity_grade, history_grade)
}

/// Like [`assess`], drawing the salt from `rng`.
pub fn assess_with_rng<R: Rng>(
    request: &AdmissionRequest,
    node: &NodeState,
    registry: &ResourceRegistry,
    proximity: &ProximitySample,
    rng: &mut R,
) -> Result<SuitabilityBreakdown> {
    let salt = criteria::draw_salt(rng);
    assess(request, node, registry, proximity, salt)
}

/// Assesses with the proximity and history grades supplied directly.
///
/// This is the entry point for experiments that pin the environment-driven
/// criteria while sweeping the resource-driven ones.
pub fn assess_graded(
    request: &AdmissionRequest,
    node: &NodeState,
    registry: &ResourceRegistry,
    proximity_grade: f64,
    history_grade: f64,
) -> Result<SuitabilityBreakdown> {
    request.validate(node.config.p_max)?;
    registry.validate_request(request)?;

    let bare = criteria::assess_bare_metal(request, node, registry)?;
    if let BareMetal::Fail { kind } = bare {
        return Ok(SuitabilityBreakdown::bare_metal_failure(kind));
    }

    // Per-requirement grades in list order; the first zero ends grading.
    let mut per_requirement = Vec::with_capacity(request.requirements.len());
    for requirement in &request.requirements {
        let descriptor = registry.get(&requirement.kind)?;
        let rho = descriptor.grade_capability(requirement, node)?;
        per_requirement.push(RequirementGrade {
            kind: requirement.kind.clone(),
            rho,
        });
        if rho == 0.0 {
            break;
        }
    }

    let rhos: Vec<f64> = per_requirement.iter().map(|grade| grade.rho).collect();
    let current = if rhos.contains(&0.0) {
        0.0
    } else {
        criteria::assess_current(&rhos, node.config.tau)?
    };

    let priority_grade = criteria::grade_priority(request.priority, node.config.p_max)?;
    let suitability = criteria::combine(1, current, priority_grade, proximity_grade, history_grade)?;

    Ok(SuitabilityBreakdown {
        bare_metal: 1,
        current_resources: current,
        priority_grade,
        proximity: proximity_grade,
        history: history_grade,
        suitability,
        per_requirement,
        failed_kind: None,
    })
}

/// Convenience: history metrics for a request from a node's own log.
pub fn history_metrics(node: &NodeState, request: &AdmissionRequest) -> HistoryMetrics {
    history::compute_metrics(&node.history, request, &node.totals)
}

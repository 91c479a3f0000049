//! Browser bindings for the suitability engine.
//!
//! Three operations back the demo page in `www/`: grading one request
//! against one node, grading a flow against every class of a shaped
//! interface, and running a full negotiation over a topology. All three
//! speak JSON strings so the page needs no generated types.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use suitability::criteria::ProximitySample;
use suitability::engine;
use suitability::request::AdmissionRequest;
use suitability::resources::{NetworkInterface, NodeState, ResourceRegistry};
use suitability::simnet::{Simulator, Topology};
use suitability::tsn::{effort_grade, free_time, needed_time, transmission_time};

fn assess_impl(
    node_json: &str,
    request_json: &str,
    proximity_json: &str,
    salt: f64,
) -> Result<String, String> {
    let node = NodeState::from_json(node_json).map_err(|e| e.to_string())?;
    let request = AdmissionRequest::from_json(request_json).map_err(|e| e.to_string())?;
    let proximity: ProximitySample =
        serde_json::from_str(proximity_json).map_err(|e| e.to_string())?;
    let registry = ResourceRegistry::with_builtins();
    let breakdown = engine::assess(&request, &node, &registry, &proximity, salt)
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&breakdown).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ClassGrade {
    class_id: String,
    t_open_ms: f64,
    occupied_ms: f64,
    t_free_ms: f64,
    grade: f64,
    feasible: bool,
}

#[derive(Serialize)]
struct ShaperGrades {
    t_tx_ms: f64,
    t_needed_ms: f64,
    classes: Vec<ClassGrade>,
}

fn tas_grades_impl(
    interface_json: &str,
    data_size_bits: f64,
    guard_fraction: f64,
) -> Result<String, String> {
    let interface = NetworkInterface::from_json(interface_json).map_err(|e| e.to_string())?;
    let schedule = interface
        .tas
        .as_ref()
        .ok_or_else(|| "interface carries no traffic classes".to_string())?;
    schedule.validate().map_err(|e| e.to_string())?;
    if data_size_bits.is_nan() || data_size_bits <= 0.0 {
        return Err(format!("data size must be positive, got {data_size_bits}"));
    }
    if guard_fraction < 0.0 {
        return Err(format!("guard fraction must be nonnegative, got {guard_fraction}"));
    }

    let t_tx_ms =
        transmission_time(data_size_bits, interface.bandwidth_bps).map_err(|e| e.to_string())?
            * 1e3;
    let t_needed_ms = needed_time(t_tx_ms, guard_fraction);
    let classes = schedule
        .classes
        .iter()
        .map(|class| {
            let t_free_ms = free_time(class);
            ClassGrade {
                class_id: class.class_id.clone(),
                t_open_ms: class.t_open_ms,
                occupied_ms: class.occupied_ms(),
                t_free_ms,
                grade: effort_grade(t_needed_ms, t_free_ms),
                feasible: t_free_ms >= t_needed_ms && t_free_ms > 0.0,
            }
        })
        .collect();
    serde_json::to_string(&ShaperGrades {
        t_tx_ms,
        t_needed_ms,
        classes,
    })
    .map_err(|e| e.to_string())
}

fn negotiate_impl(topology_json: &str, request_json: &str, seed: u32) -> Result<String, String> {
    let topology = Topology::from_json(topology_json).map_err(|e| e.to_string())?;
    let request = AdmissionRequest::from_json(request_json).map_err(|e| e.to_string())?;
    let mut simulator = Simulator::new(&topology, u64::from(seed));
    let trace = simulator.run(&request).map_err(|e| e.to_string())?;
    trace.to_ndjson().map_err(|e| e.to_string())
}

/// Grades one admission request against one node and returns the full
/// breakdown as JSON.
#[wasm_bindgen]
pub fn assess(
    node_json: &str,
    request_json: &str,
    proximity_json: &str,
    salt: f64,
) -> Result<String, JsError> {
    assess_impl(node_json, request_json, proximity_json, salt).map_err(|e| JsError::new(&e))
}

/// Grades a flow of `data_size_bits` against every traffic class of a
/// shaped interface; returns times and per-class grades as JSON.
#[wasm_bindgen]
pub fn tas_grades(
    interface_json: &str,
    data_size_bits: f64,
    guard_fraction: f64,
) -> Result<String, JsError> {
    tas_grades_impl(interface_json, data_size_bits, guard_fraction).map_err(|e| JsError::new(&e))
}

/// Runs a seeded negotiation over a topology and returns the trace as
/// newline-delimited JSON events.
#[wasm_bindgen]
pub fn negotiate(topology_json: &str, request_json: &str, seed: u32) -> Result<String, JsError> {
    negotiate_impl(topology_json, request_json, seed).map_err(|e| JsError::new(&e))
}

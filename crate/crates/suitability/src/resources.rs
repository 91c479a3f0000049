//! Resource types and the registry that dispatches assessment to them.
//!
//! Every requirement kind contributes two functions: a bare-metal check
//! against a node's *total* capacities, and a capability grade against
//! what is *currently* available. Built-in kinds cover CPU cores, memory,
//! interface bandwidth, and the time-aware shaper; callers register
//! further kinds through the same [`ResourceTypeDescriptor`] contract.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::history::HistoryLog;
use crate::request::{AdmissionRequest, Requirement};
use crate::tsn::{self, TasSchedule, DEFAULT_GUARD_FRACTION};

/// Built-in requirement kind: number of CPU cores.
pub const CPU_CORES: &str = "cpu.cores";
/// Built-in requirement kind: bytes of memory.
pub const MEM_BYTES: &str = "mem.bytes";
/// Built-in requirement kind: interface bandwidth in bits per second.
pub const NET_BANDWIDTH_BPS: &str = "net.bandwidth_bps";
/// Built-in requirement kind: a time-aware-shaper service slot; the
/// amount is the flow's message size in bits.
pub const TSN_TAS: &str = "tsn.tas";

type BareMetalCheck = Box<dyn Fn(&Requirement, &NodeState) -> bool + Send + Sync>;
type CapabilityGrade = Box<dyn Fn(&Requirement, &NodeState) -> Result<f64> + Send + Sync>;

/// One pluggable resource kind: its bare-metal check and its
/// current-capability grader.
///
/// The bare-metal check must depend only on total capacities; the
/// capability grade only on current availability, and it must stay within
/// [0, 1] for every valid input.
pub struct ResourceTypeDescriptor {
    kind: String,
    allowed_params: Vec<String>,
    bare_metal_check: BareMetalCheck,
    capability_grade: CapabilityGrade,
}

impl fmt::Debug for ResourceTypeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResourceTypeDescriptor")
            .field("kind", &self.kind)
            .field("allowed_params", &self.allowed_params)
            .finish_non_exhaustive()
    }
}

impl ResourceTypeDescriptor {
    pub fn new(
        kind: impl Into<String>,
        bare_metal_check: impl Fn(&Requirement, &NodeState) -> bool + Send + Sync + 'static,
        capability_grade: impl Fn(&Requirement, &NodeState) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: kind.into(),
            allowed_params: Vec::new(),
            bare_metal_check: Box::new(bare_metal_check),
            capability_grade: Box::new(capability_grade),
        }
    }

    /// Declares the parameter keys this kind accepts; anything else on a
    /// requirement of this kind is rejected at validation.
    pub fn with_allowed_params(mut self, params: &[&str]) -> Self {
        self.allowed_params = params.iter().map(|p| p.to_string()).collect();
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn check_bare_metal(&self, requirement: &Requirement, node: &NodeState) -> bool {
        (self.bare_metal_check)(requirement, node)
    }

    /// Grades current capability, enforcing the normalization contract.
    pub fn grade_capability(&self, requirement: &Requirement, node: &NodeState) -> Result<f64> {
        let value = (self.capability_grade)(requirement, node)?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::GradeOutOfRange {
                kind: self.kind.clone(),
                value,
            });
        }
        Ok(value)
    }

    /// Rejects requirement params this kind does not understand, so typos
    /// surface instead of being silently ignored.
    pub fn validate_params(&self, requirement: &Requirement) -> Result<()> {
        for param in requirement.params.keys() {
            if !self.allowed_params.iter().any(|p| p == param) {
                return Err(Error::UnexpectedParam {
                    kind: self.kind.clone(),
                    param: param.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Write-once-then-read-many map from requirement kind to descriptor.
#[derive(Debug, Default)]
pub struct ResourceRegistry {
    descriptors: BTreeMap<String, ResourceTypeDescriptor>,
}

impl ResourceRegistry {
    /// An empty registry with no kinds.
    pub fn new() -> Self {
        Self::default()
    }

    /// A registry with the built-in kinds registered.
    pub fn with_builtins() -> Self {
        let mut registry = Self::new();
        registry
            .register(ResourceTypeDescriptor::new(
                CPU_CORES,
                |req, node| bare_metal_cpu(req.amount, node),
                |req, node| Ok(cpu_capability(req.amount, node)),
            ))
            .expect("empty registry");
        registry
            .register(ResourceTypeDescriptor::new(
                MEM_BYTES,
                |req, node| total_supports(MEM_BYTES, req.amount, node),
                |req, node| Ok(memory_capability(req.amount, node)),
            ))
            .expect("cpu only");
        registry
            .register(ResourceTypeDescriptor::new(
                NET_BANDWIDTH_BPS,
                |req, node| bare_metal_bandwidth(req.amount, node),
                |req, node| Ok(bandwidth_capability(req.amount, node)),
            ))
            .expect("cpu and memory only");
        registry
            .register(
                ResourceTypeDescriptor::new(
                    TSN_TAS,
                    |_req, node| tsn::tas_bare_metal(node),
                    tas_capability_grade,
                )
                .with_allowed_params(&["guard_fraction", "class_index", "interface_index"]),
            )
            .expect("no tsn yet");
        registry
    }

    pub fn register(&mut self, descriptor: ResourceTypeDescriptor) -> Result<()> {
        if self.descriptors.contains_key(descriptor.kind()) {
            return Err(Error::DuplicateResourceType(descriptor.kind().to_string()));
        }
        self.descriptors
            .insert(descriptor.kind().to_string(), descriptor);
        Ok(())
    }

    pub fn get(&self, kind: &str) -> Result<&ResourceTypeDescriptor> {
        self.descriptors
            .get(kind)
            .ok_or_else(|| Error::UnknownResourceType(kind.to_string()))
    }

    pub fn contains(&self, kind: &str) -> bool {
        self.descriptors.contains_key(kind)
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.descriptors.keys().map(String::as_str)
    }

    /// Checks that every requirement kind is registered and only carries
    /// params its descriptor accepts.
    pub fn validate_request(&self, request: &AdmissionRequest) -> Result<()> {
        for requirement in &request.requirements {
            let descriptor = self.get(&requirement.kind)?;
            descriptor.validate_params(requirement)?;
        }
        Ok(())
    }
}

/// A network interface, optionally carrying a time-aware-shaper schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInterface {
    pub interface_id: String,
    /// Link speed in bits per second; must be positive.
    pub bandwidth_bps: f64,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub tas: Option<TasSchedule>,
}

impl NetworkInterface {
    pub fn new(interface_id: impl Into<String>, bandwidth_bps: f64) -> Self {
        Self {
            interface_id: interface_id.into(),
            bandwidth_bps,
            tas: None,
        }
    }

    pub fn with_tas(mut self, schedule: TasSchedule) -> Self {
        self.tas = Some(schedule);
        self
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

/// A node's declared capacities, current usage, interfaces, admission
/// history, and engine configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeState {
    pub node_id: String,
    /// Bare-metal capacities by kind.
    #[serde(default)]
    pub totals: BTreeMap<String, f64>,
    /// Amounts currently committed, by kind.
    #[serde(default)]
    pub in_use: BTreeMap<String, f64>,
    #[serde(default)]
    pub interfaces: Vec<NetworkInterface>,
    #[serde(skip)]
    pub history: HistoryLog,
    #[serde(default, skip_serializing)]
    pub config: EngineConfig,
}

impl NodeState {
    pub fn new(node_id: impl Into<String>) -> Self {
        Self {
            node_id: node_id.into(),
            totals: BTreeMap::new(),
            in_use: BTreeMap::new(),
            interfaces: Vec::new(),
            history: HistoryLog::default(),
            config: EngineConfig::default(),
        }
    }

    pub fn with_total(mut self, kind: impl Into<String>, amount: f64) -> Self {
        self.totals.insert(kind.into(), amount);
        self
    }

    pub fn with_in_use(mut self, kind: impl Into<String>, amount: f64) -> Self {
        self.in_use.insert(kind.into(), amount);
        self
    }

    pub fn with_interface(mut self, interface: NetworkInterface) -> Self {
        self.interfaces.push(interface);
        self
    }

    pub fn with_config(mut self, config: EngineConfig) -> Self {
        self.config = config;
        self
    }

    /// Total capacity for a kind; zero when undeclared.
    pub fn total(&self, kind: &str) -> f64 {
        self.totals.get(kind).copied().unwrap_or(0.0)
    }

    /// Currently available capacity: total minus in-use, floored at zero.
    pub fn available(&self, kind: &str) -> f64 {
        let in_use = self.in_use.get(kind).copied().unwrap_or(0.0);
        (self.total(kind) - in_use).max(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (kind, &in_use) in &self.in_use {
            let total = self.total(kind);
            if in_use < 0.0 || in_use > total {
                return Err(Error::UsageExceedsTotal {
                    kind: kind.clone(),
                    in_use,
                    total,
                });
            }
        }
        for interface in &self.interfaces {
            if interface.bandwidth_bps.is_nan() || interface.bandwidth_bps <= 0.0 {
                return Err(Error::NonPositiveBandwidth(interface.interface_id.clone()));
            }
            if let Some(tas) = &interface.tas {
                tas.validate()?;
            }
        }
        self.config.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let node: Self = serde_json::from_str(text)?;
        node.validate()?;
        Ok(node)
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

fn total_supports(kind: &str, requested: f64, node: &NodeState) -> bool {
    requested >= 0.0 && requested <= node.total(kind)
}

/// Linear capability grade shared by the scalar built-ins: zero at or
/// above the available amount, otherwise `1 - requested / available`.
fn linear_capability(kind: &str, requested: f64, node: &NodeState) -> f64 {
    let available = node.available(kind);
    if requested >= available {
        return 0.0;
    }
    1.0 - requested / available
}

/// Bare-metal CPU check: fails for negative demand or demand above the
/// total core count; equality passes (only the current-resources guard
/// nullifies at full utilization).
pub fn bare_metal_cpu(requested_cores: f64, node: &NodeState) -> bool {
    total_supports(CPU_CORES, requested_cores, node)
}

/// Current CPU grade: linear in the requested share of the available
/// cores, with an over-provision guard at `requested >= available`.
pub fn cpu_capability(requested_cores: f64, node: &NodeState) -> f64 {
    linear_capability(CPU_CORES, requested_cores, node)
}

/// Current memory grade; same shape as the CPU grade, in bytes.
pub fn memory_capability(requested_bytes: f64, node: &NodeState) -> f64 {
    linear_capability(MEM_BYTES, requested_bytes, node)
}

fn bare_metal_bandwidth(requested_bps: f64, node: &NodeState) -> bool {
    requested_bps >= 0.0
        && node
            .interfaces
            .iter()
            .any(|interface| interface.bandwidth_bps >= requested_bps)
}

/// Bandwidth grade: the best linear grade over the node's interfaces,
/// each reduced by the node-level bandwidth already in use.
fn bandwidth_capability(requested_bps: f64, node: &NodeState) -> f64 {
    let reserved = node.in_use.get(NET_BANDWIDTH_BPS).copied().unwrap_or(0.0);
    node.interfaces
        .iter()
        .map(|interface| {
            let available = (interface.bandwidth_bps - reserved).max(0.0);
            if requested_bps >= available {
                0.0
            } else {
                1.0 - requested_bps / available
            }
        })
        .fold(0.0, f64::max)
}

/// TAS grade: the effort of fitting a flow of `amount` bits into a
/// traffic class. With an explicit `class_index`/`interface_index` the
/// named class is graded; otherwise the best class across all shaped
/// interfaces wins.
fn tas_capability_grade(requirement: &Requirement, node: &NodeState) -> Result<f64> {
    if requirement.amount <= 0.0 {
        return Err(Error::InvalidDataSize(requirement.amount));
    }
    let guard_fraction = requirement
        .param("guard_fraction")
        .unwrap_or(DEFAULT_GUARD_FRACTION);
    if guard_fraction < 0.0 {
        return Err(Error::InvalidGuardFraction(guard_fraction));
    }

    let shaped: Vec<&NetworkInterface> = node
        .interfaces
        .iter()
        .filter(|interface| interface.tas.as_ref().is_some_and(|t| !t.classes.is_empty()))
        .collect();

    let candidates: Vec<&NetworkInterface> = match requirement.param("interface_index") {
        Some(index) => {
            let index = index as usize;
            match shaped.get(index) {
                Some(interface) => vec![interface],
                None => return Ok(0.0),
            }
        }
        None => shaped,
    };

    let mut best = 0.0f64;
    for interface in candidates {
        let schedule = interface.tas.as_ref().expect("filtered to shaped interfaces");
        let t_tx_ms = tsn::transmission_time(requirement.amount, interface.bandwidth_bps)? * 1e3;
        let t_needed_ms = tsn::needed_time(t_tx_ms, guard_fraction);
        let graded: Vec<f64> = match requirement.param("class_index") {
            Some(index) => match schedule.classes.get(index as usize) {
                Some(class) => vec![tsn::effort_grade(t_needed_ms, tsn::free_time(class))],
                None => vec![0.0],
            },
            None => schedule
                .classes
                .iter()
                .map(|class| tsn::effort_grade(t_needed_ms, tsn::free_time(class)))
                .collect(),
        };
        for grade in graded {
            best = best.max(grade);
        }
    }
    Ok(best)
}

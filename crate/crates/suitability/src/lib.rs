//! Self-assessment of admission requests for heterogeneous nodes.
//!
//! A node receiving an admission request — an ordered list of resource
//! requirements plus a priority — grades itself on five normalized
//! criteria and combines them into a single suitability value in [0, 1],
//! comparable across any nodes running the same procedure. Resource kinds
//! are pluggable: each contributes a bare-metal check and a
//! current-capability grader through the [`resources::ResourceRegistry`],
//! with CPU cores, memory, bandwidth, and a time-aware-shaper assessor
//! built in.
//!
//! ```
//! use suitability::engine;
//! use suitability::request::{AdmissionRequest, Requirement};
//! use suitability::resources::{NodeState, ResourceRegistry, CPU_CORES};
//!
//! let node = NodeState::new("edge-1").with_total(CPU_CORES, 8.0);
//! let registry = ResourceRegistry::with_builtins();
//! let request = AdmissionRequest::new(
//!     vec![Requirement::new(CPU_CORES, 4.0)],
//!     7,
//!     "talker",
//!     "listener",
//!     "req-1",
//! );
//! let breakdown = engine::assess_graded(&request, &node, &registry, 1.0, 1.0).unwrap();
//! assert_eq!(breakdown.suitability, 0.5);
//! ```
//!
//! The [`simnet`] module layers a deterministic hop-by-hop negotiation
//! simulator on top: receive, self-assess, query neighbors, collect their
//! values, and forward to the best candidate.

pub mod config;
pub mod criteria;
pub mod engine;
pub mod error;
pub mod history;
pub mod request;
pub mod resources;
pub mod simnet;
pub mod tsn;

pub use config::{EngineConfig, ProximityMaxima};
pub use criteria::{BareMetal, HistoryMetrics, ProximitySample};
pub use engine::{RequirementGrade, SuitabilityBreakdown};
pub use error::{Error, Result};
pub use history::{AdmissionRecord, CapacitySample, HistoryLog};
pub use request::{AdmissionRequest, Requirement};
pub use resources::{NetworkInterface, NodeState, ResourceRegistry, ResourceTypeDescriptor};
pub use simnet::{NegotiationTrace, Simulator, Topology, TraceEvent};
pub use tsn::{ServiceFlow, TasSchedule, TrafficClass};

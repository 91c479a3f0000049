//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by configuration loading, validation, grading, and the
/// negotiation simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tau must be strictly between 0.5 and 1.0, got {0}")]
    TauOutOfRange(f64),

    #[error("delta weights must sum to 1 within 1e-12, got {0:?} summing to {sum}", sum = .0.iter().sum::<f64>())]
    DeltaSumInvalid([f64; 4]),

    #[error("salt_weight must be in [0, 0.01), got {0}")]
    SaltWeightOutOfRange(f64),

    #[error("proximity maximum {field} must be positive, got {value}")]
    ProximityMaximumInvalid { field: &'static str, value: f64 },

    #[error("criterion {criterion} out of range: {value}")]
    CriterionOutOfRange { criterion: &'static str, value: f64 },

    #[error("requirement list must not be empty")]
    EmptyRequirements,

    #[error("requirement kind must not be empty")]
    EmptyKind,

    #[error("requirement amount must be finite and nonnegative, got {0}")]
    InvalidAmount(f64),

    #[error("priority {priority} exceeds p_max {p_max}")]
    PriorityOutOfRange { priority: u8, p_max: u8 },

    #[error("unknown resource type {0:?}")]
    UnknownResourceType(String),

    #[error("resource type {0:?} is already registered")]
    DuplicateResourceType(String),

    #[error("parameter {param:?} is not accepted by resource type {kind:?}")]
    UnexpectedParam { kind: String, param: String },

    #[error("resource type {kind:?} graded {value}, outside [0, 1]")]
    GradeOutOfRange { kind: String, value: f64 },

    #[error("in-use amount for {kind:?} ({in_use}) exceeds total capacity ({total})")]
    UsageExceedsTotal {
        kind: String,
        in_use: f64,
        total: f64,
    },

    #[error("interface {0:?} must have positive bandwidth")]
    NonPositiveBandwidth(String),

    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),

    #[error("service flow data size must be positive, got {0}")]
    InvalidDataSize(f64),

    #[error("guard fraction must be nonnegative, got {0}")]
    InvalidGuardFraction(f64),

    #[error("unknown traffic class {0:?}")]
    UnknownTrafficClass(String),

    #[error("traffic class {class_id:?} gate-open time must be positive, got {t_open_ms}")]
    NonPositiveOpenTime { class_id: String, t_open_ms: f64 },

    #[error(
        "traffic class {class_id:?} is over-committed: occupancy {occupied_ms} ms exceeds t_open {t_open_ms} ms"
    )]
    OverCommittedClass {
        class_id: String,
        occupied_ms: f64,
        t_open_ms: f64,
    },

    #[error("timestamp {timestamp} is not after the last recorded tick {last}")]
    NonMonotonicTimestamp { timestamp: u64, last: u64 },

    #[error("node {0:?} not present in topology")]
    UnknownNode(String),

    #[error("duplicate edge between {a:?} and {b:?}")]
    DuplicateEdge { a: String, b: String },

    #[error("edge endpoints must differ, got a self-loop on {0:?}")]
    SelfLoopEdge(String),

    #[error("negotiation exceeded the hop limit of {0}")]
    HopLimitExceeded(usize),

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Per-node admission log and the historical-performance metrics.
//!
//! A node remembers a bounded window of past admission outcomes and
//! capacity snapshots. Four metrics are derived from them, each in
//! [0, 1]: similarity of the current request to past ones, the share of
//! granted reservations that went unused, the stability of the available
//! capacity, and the share of grants that were strict reservations. On a
//! cold start everything is zero.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::criteria::HistoryMetrics;
use crate::error::{Error, Result};
use crate::request::AdmissionRequest;

/// Monotonic logical timestamp.
pub type Tick = u64;

/// Default retention window for records and samples alike.
pub const DEFAULT_WINDOW: usize = 256;

/// Outcome of one past admission request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionRecord {
    pub request_id: String,
    pub requirement_count: u32,
    pub granted: bool,
    pub strict_reservation: bool,
    /// Observed utilization of the reservation, in [0, 1].
    pub used_fraction: f64,
    pub timestamp: Tick,
}

/// Snapshot of the node's available capacity at one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySample {
    pub timestamp: Tick,
    pub available: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LogLine {
    Admission(AdmissionRecord),
    Sample(CapacitySample),
}

/// Bounded log of admission records and capacity samples.
#[derive(Debug, Clone)]
pub struct HistoryLog {
    window: usize,
    records: VecDeque<AdmissionRecord>,
    samples: VecDeque<CapacitySample>,
}

impl Default for HistoryLog {
    fn default() -> Self {
        Self::new(DEFAULT_WINDOW)
    }
}

impl HistoryLog {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            records: VecDeque::new(),
            samples: VecDeque::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn records(&self) -> impl Iterator<Item = &AdmissionRecord> {
        self.records.iter()
    }

    pub fn samples(&self) -> impl Iterator<Item = &CapacitySample> {
        self.samples.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Appends a record; timestamps must be strictly increasing. The
    /// oldest record is evicted once the window is full.
    pub fn record_admission(&mut self, record: AdmissionRecord) -> Result<()> {
        if let Some(last) = self.records.back()
            && record.timestamp <= last.timestamp
        {
            return Err(Error::NonMonotonicTimestamp {
                timestamp: record.timestamp,
                last: last.timestamp,
            });
        }
        self.records.push_back(record);
        while self.records.len() > self.window {
            self.records.pop_front();
        }
        Ok(())
    }

    /// Appends a capacity snapshot under the same monotonicity and window
    /// rules as admission records.
    pub fn record_sample(&mut self, sample: CapacitySample) -> Result<()> {
        if let Some(last) = self.samples.back()
            && sample.timestamp <= last.timestamp
        {
            return Err(Error::NonMonotonicTimestamp {
                timestamp: sample.timestamp,
                last: last.timestamp,
            });
        }
        self.samples.push_back(sample);
        while self.samples.len() > self.window {
            self.samples.pop_front();
        }
        Ok(())
    }

    /// Serializes the log as newline-delimited JSON, one tagged entry per
    /// line, for experiment replay.
    pub fn to_ndjson(&self) -> Result<String> {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(&LogLine::Admission(record.clone()))?);
            out.push('\n');
        }
        for sample in &self.samples {
            out.push_str(&serde_json::to_string(&LogLine::Sample(sample.clone()))?);
            out.push('\n');
        }
        Ok(out)
    }

    /// Rebuilds a log from its newline-delimited JSON form.
    pub fn from_ndjson(window: usize, text: &str) -> Result<Self> {
        let mut log = Self::new(window);
        for line in text.lines().filter(|line| !line.trim().is_empty()) {
            match serde_json::from_str::<LogLine>(line)? {
                LogLine::Admission(record) => log.record_admission(record)?,
                LogLine::Sample(sample) => log.record_sample(sample)?,
            }
        }
        Ok(log)
    }
}

fn clamp01(value: f64) -> f64 {
    value.clamp(0.0, 1.0)
}

/// Derives the four historical metrics for a request against a log.
///
/// `totals` provides the denominators for the per-kind availability
/// fractions behind the stability metric. An empty log yields all zeros.
pub fn compute_metrics(
    log: &HistoryLog,
    request: &AdmissionRequest,
    totals: &BTreeMap<String, f64>,
) -> HistoryMetrics {
    if log.records.is_empty() {
        return HistoryMetrics::ZERO;
    }

    // rh1: symmetric similarity between the current requirement count and
    // the historical mean count.
    let n = request.requirements.len() as f64;
    let mean_count = log
        .records
        .iter()
        .map(|r| f64::from(r.requirement_count))
        .sum::<f64>()
        / log.records.len() as f64;
    let rh1 = if n > 0.0 && mean_count > 0.0 {
        n.min(mean_count) / n.max(mean_count)
    } else {
        0.0
    };

    // rh2: mean unused share across granted reservations.
    let granted: Vec<&AdmissionRecord> = log.records.iter().filter(|r| r.granted).collect();
    let rh2 = if granted.is_empty() {
        0.0
    } else {
        granted
            .iter()
            .map(|r| 1.0 - r.used_fraction.clamp(0.0, 1.0))
            .sum::<f64>()
            / granted.len() as f64
    };

    // rh3: stability of the scalar availability series, one minus its
    // coefficient of variation.
    let rh3 = stability(log, totals);

    // rh4: strict reservations among grants.
    let strict = granted
        .iter()
        .filter(|r| r.strict_reservation)
        .count() as f64;
    let rh4 = if granted.is_empty() {
        0.0
    } else {
        strict / granted.len() as f64
    };

    HistoryMetrics {
        rh1: clamp01(rh1),
        rh2: clamp01(rh2),
        rh3,
        rh4: clamp01(rh4),
    }
}

/// Scalar availability per sample: the mean of the per-kind available
/// fractions over the kinds the node declares.
fn scalar_availability(sample: &CapacitySample, totals: &BTreeMap<String, f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut kinds = 0usize;
    for (kind, &total) in totals {
        if total > 0.0 {
            let available = sample.available.get(kind).copied().unwrap_or(0.0);
            sum += clamp01(available / total);
            kinds += 1;
        }
    }
    (kinds > 0).then(|| sum / kinds as f64)
}

fn stability(log: &HistoryLog, totals: &BTreeMap<String, f64>) -> f64 {
    let series: Vec<f64> = log
        .samples
        .iter()
        .filter_map(|sample| scalar_availability(sample, totals))
        .collect();
    if series.is_empty() {
        return 0.0;
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    if mean <= 0.0 {
        return 0.0;
    }
    let variance = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / series.len() as f64;
    let cv = variance.sqrt() / mean;
    clamp01(1.0 - cv)
}

//! The validation experiments, emitting CSV.
//!
//! Three sweeps cover the assessment engine end to end:
//!
//! - `single-req`: one CPU requirement on an idle 8-core node, graded
//!   under cumulatively enabled criteria (phases a through d), over a
//!   grid of requested cores and priorities;
//! - `multi-req`: CPU and memory requirements in both orders on an
//!   8-core / 32 GB node, swept over priorities and the requirement
//!   weight `tau`;
//! - `salt-sweep`: paired assessments differing only in salt, per salt
//!   weight, reporting the difference statistics and the duplicate rate.
//!
//! Output is deterministic under a fixed seed: every grid cell owns an
//! RNG stream derived from the seed and the cell coordinates, rows are
//! emitted in grid order, and floats are printed with Rust's
//! shortest-round-trip formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand_core::Rng;
use serde::Deserialize;

use suitability::config::{EngineConfig, ProximityMaxima};
use suitability::criteria::{self, HistoryMetrics, ProximitySample};
use suitability::engine::{self, SuitabilityBreakdown};
use suitability::request::{AdmissionRequest, Requirement};
use suitability::resources::{NodeState, ResourceRegistry, CPU_CORES, MEM_BYTES};

use crate::streams::{cell_rng, draw_index, draw_range, draw_unit};

const TAG_SINGLE: u64 = 1;
const TAG_MULTI: u64 = 2;
const TAG_SALT: u64 = 3;

/// The experiments the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    SingleReq,
    MultiReq,
    SaltSweep,
    TasExample,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::SingleReq => "single-req",
            ExperimentName::MultiReq => "multi-req",
            ExperimentName::SaltSweep => "salt-sweep",
            ExperimentName::TasExample => "tas-example",
        }
    }
}

/// Optional overrides read from a spec file; anything omitted keeps the
/// experiment's defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecOverrides {
    pub name: Option<ExperimentName>,
    pub runs: Option<u32>,
    pub seed: Option<u64>,
    pub core_range: Option<[u32; 2]>,
    pub memory_range_gb: Option<[u32; 2]>,
    pub priority_range: Option<[u8; 2]>,
    pub taus: Option<Vec<f64>>,
    pub thetas: Option<Vec<f64>>,
    pub proximity_levels: Option<u32>,
}

pub fn load_overrides(path: impl AsRef<Path>) -> Result<SpecOverrides> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading experiment spec {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing experiment spec {}", path.display()))
}

/// A fully resolved experiment: name, run count per grid cell, seed, and
/// sweep parameters.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    /// Assessments (or assessment pairs) per grid cell.
    pub runs: u32,
    pub seed: u64,
    pub core_range: [u32; 2],
    pub memory_range_gb: [u32; 2],
    pub priority_range: [u8; 2],
    pub taus: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Quantization levels for proximity inputs in the salt sweep; zero
    /// draws them continuously instead.
    pub proximity_levels: u32,
}

impl ExperimentSpec {
    /// Defaults sized for a quick run; scale `runs` up through a spec
    /// file to match full validation campaigns.
    pub fn for_name(name: ExperimentName) -> Self {
        let runs = match name {
            ExperimentName::SingleReq => 25,
            ExperimentName::MultiReq => 2,
            ExperimentName::SaltSweep => 10_000,
            ExperimentName::TasExample => 1,
        };
        Self {
            name,
            runs,
            seed: 42,
            core_range: [0, 9],
            memory_range_gb: [0, 33],
            priority_range: [0, 7],
            taus: vec![0.51, 0.66, 0.99],
            thetas: (0..=20).map(|k| 10f64.powi(-k)).collect(),
            proximity_levels: 16,
        }
    }

    pub fn apply(mut self, overrides: SpecOverrides) -> Result<Self> {
        if let Some(name) = overrides.name
            && name != self.name
        {
            bail!(
                "spec file names experiment {:?} but {:?} was requested",
                name.as_str(),
                self.name.as_str()
            );
        }
        if let Some(runs) = overrides.runs {
            self.runs = runs;
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(range) = overrides.core_range {
            self.core_range = range;
        }
        if let Some(range) = overrides.memory_range_gb {
            self.memory_range_gb = range;
        }
        if let Some(range) = overrides.priority_range {
            self.priority_range = range;
        }
        if let Some(taus) = overrides.taus {
            self.taus = taus;
        }
        if let Some(thetas) = overrides.thetas {
            self.thetas = thetas;
        }
        if let Some(levels) = overrides.proximity_levels {
            self.proximity_levels = levels;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            bail!("runs must be positive");
        }
        for (label, lo, hi) in [
            ("core_range", u64::from(self.core_range[0]), u64::from(self.core_range[1])),
            (
                "memory_range_gb",
                u64::from(self.memory_range_gb[0]),
                u64::from(self.memory_range_gb[1]),
            ),
            (
                "priority_range",
                u64::from(self.priority_range[0]),
                u64::from(self.priority_range[1]),
            ),
        ] {
            if lo > hi {
                bail!("{label} is empty: [{lo}, {hi}]");
            }
        }
        if self.priority_range[1] > 7 {
            bail!("priority_range exceeds the default p_max of 7");
        }
        if self.taus.is_empty() {
            bail!("taus must not be empty");
        }
        for &tau in &self.taus {
            if !(tau > 0.5 && tau < 1.0) {
                bail!("tau {tau} outside (0.5, 1.0)");
            }
        }
        if self.thetas.is_empty() {
            bail!("thetas must not be empty");
        }
        for &theta in &self.thetas {
            if !(0.0..=1.0).contains(&theta) {
                bail!("theta {theta} outside [0, 1]");
            }
        }
        if self.proximity_levels == 1 {
            bail!("proximity_levels must be 0 (continuous) or at least 2");
        }
        Ok(())
    }
}

/// Runs the named experiment, writing CSV to `out`.
pub fn run(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<()> {
    match spec.name {
        ExperimentName::SingleReq => run_single_req(spec, out),
        ExperimentName::MultiReq => run_multi_req(spec, out),
        ExperimentName::SaltSweep => run_salt_sweep(spec, out),
        ExperimentName::TasExample => {
            bail!("tas-example produces a report, not CSV; it is dispatched separately")
        }
    }
}

fn eight_core_node(config: EngineConfig) -> NodeState {
    NodeState::new("fixture")
        .with_total(CPU_CORES, 8.0)
        .with_config(config)
}

fn draw_proximity<R: Rng>(rng: &mut R, maxima: &ProximityMaxima) -> ProximitySample {
    ProximitySample {
        hops: draw_index(rng, maxima.hop_max as u64 + 1) as u32,
        rtt: draw_range(rng, 0.0, maxima.rtt_max),
        loss: draw_unit(rng),
        pdv: draw_range(rng, 0.0, maxima.pdv_max),
        toward: "listener".to_string(),
    }
}

fn quantized_proximity<R: Rng>(
    rng: &mut R,
    maxima: &ProximityMaxima,
    levels: u32,
) -> ProximitySample {
    let steps = f64::from(levels - 1);
    let level = |rng: &mut R| draw_index(rng, u64::from(levels)) as f64 / steps;
    ProximitySample {
        hops: (level(rng) * maxima.hop_max).round() as u32,
        rtt: level(rng) * maxima.rtt_max,
        loss: level(rng),
        pdv: level(rng) * maxima.pdv_max,
        toward: "listener".to_string(),
    }
}

/// Suitability under the cumulative criteria phases a..d: bare metal
/// only, then current resources, then priority, then proximity.
pub fn phase_value(breakdown: &SuitabilityBreakdown, phase: usize) -> f64 {
    let bare = f64::from(breakdown.bare_metal);
    match phase {
        0 => bare,
        1 => bare * breakdown.current_resources,
        2 => bare * breakdown.current_resources * breakdown.priority_grade,
        _ => {
            bare * breakdown.current_resources
                * breakdown.priority_grade
                * breakdown.proximity
        }
    }
}

const PHASES: [&str; 4] = ["a", "b", "c", "d"];

fn run_single_req(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "requested_cores,priority,criteria_phase,suitability")?;
    let registry = ResourceRegistry::with_builtins();
    let config = EngineConfig::default();
    let node = eight_core_node(config);

    for (phase_index, phase) in PHASES.iter().enumerate() {
        for cores in spec.core_range[0]..=spec.core_range[1] {
            for priority in spec.priority_range[0]..=spec.priority_range[1] {
                let mut rng = cell_rng(
                    spec.seed,
                    &[
                        TAG_SINGLE,
                        phase_index as u64,
                        u64::from(cores),
                        u64::from(priority),
                    ],
                );
                let request = AdmissionRequest::new(
                    vec![Requirement::new(CPU_CORES, f64::from(cores))],
                    priority,
                    "talker",
                    "listener",
                    "single-req",
                );
                for _ in 0..spec.runs {
                    let sample = draw_proximity(&mut rng, &config.proximity_maxima);
                    let proximity = criteria::assess_proximity(&sample, &config);
                    let breakdown =
                        engine::assess_graded(&request, &node, &registry, proximity, 0.0)?;
                    let suitability = phase_value(&breakdown, phase_index);
                    writeln!(out, "{cores},{priority},{phase},{suitability}")?;
                }
            }
        }
    }
    Ok(())
}

fn format_rho(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn run_multi_req(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "rho_cpu,rho_mem,priority,tau,suitability,order,requested_cores,requested_mem_gb"
    )?;
    let registry = ResourceRegistry::with_builtins();
    const ORDERS: [&str; 2] = ["cpu-mem", "mem-cpu"];

    for (order_index, order) in ORDERS.iter().enumerate() {
        for (tau_index, &tau) in spec.taus.iter().enumerate() {
            let config = EngineConfig {
                tau,
                ..EngineConfig::default()
            };
            let node = eight_core_node(config).with_total(MEM_BYTES, 32e9);
            for cores in spec.core_range[0]..=spec.core_range[1] {
                for mem_gb in spec.memory_range_gb[0]..=spec.memory_range_gb[1] {
                    for priority in spec.priority_range[0]..=spec.priority_range[1] {
                        let mut rng = cell_rng(
                            spec.seed,
                            &[
                                TAG_MULTI,
                                order_index as u64,
                                tau_index as u64,
                                u64::from(cores),
                                u64::from(mem_gb),
                                u64::from(priority),
                            ],
                        );
                        let cpu = Requirement::new(CPU_CORES, f64::from(cores));
                        let mem = Requirement::new(MEM_BYTES, f64::from(mem_gb) * 1e9);
                        let requirements = if order_index == 0 {
                            vec![cpu, mem]
                        } else {
                            vec![mem, cpu]
                        };
                        let request = AdmissionRequest::new(
                            requirements,
                            priority,
                            "talker",
                            "listener",
                            "multi-req",
                        );
                        for _ in 0..spec.runs {
                            let sample = draw_proximity(&mut rng, &config.proximity_maxima);
                            let proximity = criteria::assess_proximity(&sample, &config);
                            let breakdown = engine::assess_graded(
                                &request, &node, &registry, proximity, 0.0,
                            )?;
                            let rho_of = |kind: &str| {
                                breakdown
                                    .per_requirement
                                    .iter()
                                    .find(|grade| grade.kind == kind)
                                    .map(|grade| grade.rho)
                            };
                            writeln!(
                                out,
                                "{},{},{priority},{tau},{},{order},{cores},{mem_gb}",
                                format_rho(rho_of(CPU_CORES)),
                                format_rho(rho_of(MEM_BYTES)),
                                breakdown.suitability,
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Difference statistics and duplicate rate for one salt weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaltRow {
    pub theta: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    /// Share of assessments whose suitability had already occurred in
    /// the same sweep.
    pub duplicate_rate: f64,
}

/// Runs the salt sweep and returns the per-theta rows; the CSV emitter
/// wraps this.
pub fn salt_sweep_rows(spec: &ExperimentSpec) -> Result<Vec<SaltRow>> {
    let registry = ResourceRegistry::with_builtins();
    let mut rows = Vec::with_capacity(spec.thetas.len());

    for (theta_index, &theta) in spec.thetas.iter().enumerate() {
        let config = EngineConfig {
            salt_weight: theta,
            ..EngineConfig::default()
        };
        let node = eight_core_node(config);
        let mut rng = cell_rng(spec.seed, &[TAG_SALT, theta_index as u64]);

        let mut diffs = Vec::with_capacity(spec.runs as usize);
        let mut salted_bits = Vec::with_capacity(spec.runs as usize);
        for _ in 0..spec.runs {
            // Requests stay within the node's capacity so neither factor
            // of the pair collapses to zero on its own.
            let cores = draw_index(&mut rng, 8);
            let priority = draw_index(&mut rng, 8) as u8;
            let sample = if spec.proximity_levels == 0 {
                draw_proximity(&mut rng, &config.proximity_maxima)
            } else {
                quantized_proximity(&mut rng, &config.proximity_maxima, spec.proximity_levels)
            };
            let salt = draw_unit(&mut rng);

            let request = AdmissionRequest::new(
                vec![Requirement::new(CPU_CORES, cores as f64)],
                priority,
                "talker",
                "listener",
                "salt-sweep",
            );
            let proximity = criteria::assess_proximity(&sample, &config);
            let history_plain = criteria::assess_history(&HistoryMetrics::ZERO, 0.0, &config)?;
            let history_salted = criteria::assess_history(&HistoryMetrics::ZERO, salt, &config)?;
            let plain =
                engine::assess_graded(&request, &node, &registry, proximity, history_plain)?;
            let salted =
                engine::assess_graded(&request, &node, &registry, proximity, history_salted)?;
            diffs.push((plain.suitability - salted.suitability).abs());
            salted_bits.push(salted.suitability.to_bits());
        }

        let n = diffs.len() as f64;
        let min = diffs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = diffs.iter().sum::<f64>() / n;
        let variance = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;

        salted_bits.sort_unstable();
        let distinct = {
            let mut count = 0usize;
            let mut previous = None;
            for &bits in &salted_bits {
                if previous != Some(bits) {
                    count += 1;
                    previous = Some(bits);
                }
            }
            count
        };
        let duplicate_rate = (salted_bits.len() - distinct) as f64 / n;

        rows.push(SaltRow {
            theta,
            min,
            max,
            mean,
            stddev: variance.sqrt(),
            duplicate_rate,
        });
    }
    Ok(rows)
}

fn run_salt_sweep(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "theta,min,max,mean,stddev,duplicate_rate")?;
    for row in salt_sweep_rows(spec)? {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.theta, row.min, row.max, row.mean, row.stddev, row.duplicate_rate
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: ExperimentName) -> ExperimentSpec {
        ExperimentSpec::for_name(name)
    }

    fn run_to_string(spec: &ExperimentSpec) -> String {
        let mut buffer = Vec::new();
        run(spec, &mut buffer).unwrap();
        String::from_utf8(buffer).unwrap()
    }

    #[test]
    fn single_req_emits_the_full_grid() {
        let mut spec = spec(ExperimentName::SingleReq);
        spec.runs = 2;
        let csv = run_to_string(&spec);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "requested_cores,priority,criteria_phase,suitability"
        );
        // 4 phases x 10 cores x 8 priorities x 2 runs.
        assert_eq!(lines.count(), 4 * 10 * 8 * 2);
    }

    #[test]
    fn single_req_phase_a_is_binary_on_bare_metal() {
        let mut spec = spec(ExperimentName::SingleReq);
        spec.runs = 1;
        let csv = run_to_string(&spec);
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields[2] != "a" {
                continue;
            }
            let cores: u32 = fields[0].parse().unwrap();
            let value: f64 = fields[3].parse().unwrap();
            if cores > 8 {
                assert_eq!(value, 0.0, "line {line}");
            } else {
                assert_eq!(value, 1.0, "line {line}");
            }
        }
    }

    #[test]
    fn single_req_phase_b_nullifies_at_full_demand() {
        let mut spec = spec(ExperimentName::SingleReq);
        spec.runs = 1;
        let csv = run_to_string(&spec);
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let cores: u32 = fields[0].parse().unwrap();
            let value: f64 = fields[3].parse().unwrap();
            if fields[2] == "b" && cores == 8 {
                assert_eq!(value, 0.0, "line {line}");
            }
            assert!((0.0..=1.0).contains(&value), "line {line}");
        }
    }

    #[test]
    fn single_req_phase_c_hits_the_priority_ceiling() {
        let mut spec = spec(ExperimentName::SingleReq);
        spec.runs = 3;
        let csv = run_to_string(&spec);
        let mut seen = 0;
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields[2] == "c" && fields[0] == "0" && fields[1] == "6" {
                assert_eq!(fields[3], "0.875", "line {line}");
                seen += 1;
            }
        }
        assert_eq!(seen, 3);
    }

    #[test]
    fn multi_req_emits_the_full_grid() {
        let mut spec = spec(ExperimentName::MultiReq);
        spec.runs = 1;
        spec.taus = vec![0.66];
        let csv = run_to_string(&spec);
        // 2 orders x 1 tau x 10 cores x 34 memory levels x 8 priorities.
        assert_eq!(csv.lines().count() - 1, 2 * 10 * 34 * 8);
    }

    #[test]
    fn csv_is_byte_deterministic_under_a_seed() {
        for name in [
            ExperimentName::SingleReq,
            ExperimentName::MultiReq,
            ExperimentName::SaltSweep,
        ] {
            let mut spec = spec(name);
            spec.runs = match name {
                ExperimentName::SaltSweep => 200,
                _ => 1,
            };
            spec.thetas = vec![1.0, 1e-10];
            assert_eq!(
                run_to_string(&spec),
                run_to_string(&spec),
                "{} not deterministic",
                name.as_str()
            );
        }
    }

    #[test]
    fn multi_req_zero_rho_zeroes_suitability() {
        let mut spec = spec(ExperimentName::MultiReq);
        spec.runs = 1;
        spec.taus = vec![0.66];
        let csv = run_to_string(&spec);
        let mut saw_zero_rho = false;
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let rho_cpu = fields[0];
            let rho_mem = fields[1];
            let suitability: f64 = fields[4].parse().unwrap();
            if rho_cpu == "0" || rho_mem == "0" {
                saw_zero_rho = true;
                assert_eq!(suitability, 0.0, "line {line}");
            }
        }
        assert!(saw_zero_rho, "grid never hit a zero grade");
    }

    #[test]
    fn salt_sweep_reports_one_row_per_theta() {
        let mut spec = spec(ExperimentName::SaltSweep);
        spec.runs = 500;
        spec.thetas = vec![1.0, 1e-2, 0.0];
        let rows = salt_sweep_rows(&spec).unwrap();
        assert_eq!(rows.len(), 3);
        for (row, &theta) in rows.iter().zip(&spec.thetas) {
            assert_eq!(row.theta, theta);
            assert!(row.max <= theta / 2.0 + 1e-15, "row {row:?}");
            assert!(row.min >= 0.0);
        }
        // Unsalted assessments over a quantized grid collide.
        assert!(rows[2].duplicate_rate > 0.0);
    }

    #[test]
    fn spec_overrides_merge_and_validate() {
        let overrides: SpecOverrides =
            serde_json::from_str(r#"{"runs": 7, "thetas": [0.5], "seed": 9}"#).unwrap();
        let spec = ExperimentSpec::for_name(ExperimentName::SaltSweep)
            .apply(overrides)
            .unwrap();
        assert_eq!(spec.runs, 7);
        assert_eq!(spec.seed, 9);
        assert_eq!(spec.thetas, vec![0.5]);

        let bad: SpecOverrides = serde_json::from_str(r#"{"taus": [0.5]}"#).unwrap();
        assert!(ExperimentSpec::for_name(ExperimentName::MultiReq)
            .apply(bad)
            .is_err());

        let mismatched: SpecOverrides =
            serde_json::from_str(r#"{"name": "multi-req"}"#).unwrap();
        assert!(ExperimentSpec::for_name(ExperimentName::SingleReq)
            .apply(mismatched)
            .is_err());
    }
}

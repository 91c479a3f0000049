//! The time-aware-shaper worked example as a self-checking report.
//!
//! Loads the two-class schedule fixture, fits a 5 Mbit flow with a 10%
//! guard over a 1000 Mbit/s interface, and verifies the derived times and
//! grades against their pinned expected values. Any deviation beyond
//! tolerance fails the report (and the CLI exits with code 2).

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{ensure, Context, Result};

use suitability::resources::NetworkInterface;
use suitability::tsn::{effort_grade, free_time, needed_time, transmission_time};

/// Message size of the example flow, bits.
pub const EXAMPLE_DATA_SIZE_BITS: f64 = 5e6;
/// Guard fraction of the example flow.
pub const EXAMPLE_GUARD_FRACTION: f64 = 0.1;

/// One verified value.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub expected: f64,
    pub tolerance: f64,
    pub actual: f64,
}

impl Check {
    pub fn passes(&self) -> bool {
        (self.actual - self.expected).abs() <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct ClassReport {
    pub class_id: String,
    pub t_free_ms: f64,
    pub grade: f64,
}

#[derive(Debug, Clone)]
pub struct TasExampleReport {
    pub t_tx_ms: f64,
    pub t_needed_ms: f64,
    pub classes: Vec<ClassReport>,
    pub checks: Vec<Check>,
}

impl TasExampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "t_tx_ms = {}", self.t_tx_ms);
        let _ = writeln!(out, "t_needed_ms = {}", self.t_needed_ms);
        for class in &self.classes {
            let _ = writeln!(
                out,
                "class {}: t_free_ms = {}, grade = {}",
                class.class_id, class.t_free_ms, class.grade
            );
        }
        for check in &self.checks {
            let _ = writeln!(
                out,
                "check {}: expected {} (tolerance {}), actual {} -> {}",
                check.label,
                check.expected,
                check.tolerance,
                check.actual,
                if check.passes() { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "tas-example: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

/// Runs the worked example against a schedule fixture.
///
/// The fixture must carry at least two traffic classes; the first is
/// expected to fit the flow, the second to require widening its gate.
pub fn run_tas_example(fixture: impl AsRef<Path>) -> Result<TasExampleReport> {
    let fixture = fixture.as_ref();
    let interface = NetworkInterface::load(fixture)
        .with_context(|| format!("loading schedule fixture {}", fixture.display()))?;
    let schedule = interface
        .tas
        .as_ref()
        .context("fixture interface carries no traffic classes")?;
    schedule.validate()?;
    ensure!(
        schedule.classes.len() >= 2,
        "fixture must define at least two traffic classes, found {}",
        schedule.classes.len()
    );

    let t_tx_ms = transmission_time(EXAMPLE_DATA_SIZE_BITS, interface.bandwidth_bps)? * 1e3;
    let t_needed_ms = needed_time(t_tx_ms, EXAMPLE_GUARD_FRACTION);

    let classes: Vec<ClassReport> = schedule
        .classes
        .iter()
        .map(|class| {
            let t_free_ms = free_time(class);
            ClassReport {
                class_id: class.class_id.clone(),
                t_free_ms,
                grade: effort_grade(t_needed_ms, t_free_ms),
            }
        })
        .collect();

    let checks = vec![
        Check {
            label: "t_tx_ms".into(),
            expected: 5.0,
            tolerance: 1e-9,
            actual: t_tx_ms,
        },
        Check {
            label: "t_needed_ms".into(),
            expected: 5.5,
            tolerance: 1e-9,
            actual: t_needed_ms,
        },
        Check {
            label: format!("t_free_ms[{}]", classes[0].class_id),
            expected: 13.0,
            tolerance: 1e-9,
            actual: classes[0].t_free_ms,
        },
        Check {
            label: format!("t_free_ms[{}]", classes[1].class_id),
            expected: 4.4,
            tolerance: 1e-9,
            actual: classes[1].t_free_ms,
        },
        Check {
            label: format!("grade[{}]", classes[0].class_id),
            expected: 0.711,
            tolerance: 1e-3,
            actual: classes[0].grade,
        },
        Check {
            label: format!("grade[{}]", classes[1].class_id),
            expected: 0.125,
            tolerance: 1e-12,
            actual: classes[1].grade,
        },
    ];

    Ok(TasExampleReport {
        t_tx_ms,
        t_needed_ms,
        classes,
        checks,
    })
}

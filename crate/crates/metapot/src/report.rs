//! Versioned JSON records of computations and their checks.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const REPORT_VERSION: u32 = 1;

/// A named pass/fail check with the value compared and its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), passed: value <= tolerance, value, tolerance }
    }

    /// Passes when `value ≥ −tolerance`; for signed margins.
    pub fn margin(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), passed: value >= -tolerance, value, tolerance }
    }

    /// A boolean outcome; `value` is 1 or 0 and the tolerance is 0.
    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, value: if passed { 1.0 } else { 0.0 }, tolerance: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub report_version: u32,
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub seed: Option<u64>,
}

impl ExperimentReport {
    pub fn new(command: impl Into<String>, parameters: Value) -> Self {
        ExperimentReport {
            report_version: REPORT_VERSION,
            command: command.into(),
            parameters,
            results: Value::Null,
            checks: Vec::new(),
            timings: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold finite JSON values")
    }
}

/// Times `f` and records the elapsed seconds under `phase`.
pub fn timed<T>(timings: &mut BTreeMap<String, f64>, phase: &str, f: impl FnOnce() -> T) -> T {
    let start = std::time::Instant::now();
    let out = f();
    timings.insert(phase.to_string(), start.elapsed().as_secs_f64());
    out
}

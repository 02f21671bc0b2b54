//! JSON reports. Key order is fixed by the struct layout and `BTreeMap`s,
//! so two runs with the same configuration serialize identically apart from
//! the `elapsed_ms` fields.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Name of every timing field; [`strip_timing`] removes exactly these.
pub const TIMING_KEY: &str = "elapsed_ms";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { reason: String },
    /// Not attempted: the exact images would exceed the configured budget.
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    pub index: u64,
    pub kind: String,
    pub inputs: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub target: String,
    pub d: u32,
    pub k: u32,
    pub l: u32,
    pub seed: u64,
    pub cases: u64,
    pub degree: u32,
    pub budget: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    pub results: Vec<CaseReport>,
    pub elapsed_ms: f64,
}

impl SuiteReport {
    /// No case failed. Skipped cases are listed but do not fail the run.
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Every case ran and passed.
    pub fn complete(&self) -> bool {
        self.failed == 0 && self.skipped == 0
    }

    pub fn count(&self, kind: &str) -> (u64, u64, u64) {
        let mut counts = (0, 0, 0);
        for case in self.results.iter().filter(|c| c.kind == kind) {
            match case.verdict {
                Verdict::Pass => counts.0 += 1,
                Verdict::Fail { .. } => counts.1 += 1,
                Verdict::Skipped { .. } => counts.2 += 1,
            }
        }
        counts
    }
}

/// Removes every timing field, recursively.
pub fn strip_timing(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.remove(TIMING_KEY);
            for v in map.values_mut() {
                strip_timing(v);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

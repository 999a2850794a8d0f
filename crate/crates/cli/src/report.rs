//! JSON report. Everything except `wall_ms` is a function of the
//! configuration alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog;
use crate::suites::Outcome;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CounterexampleOut {
    pub input: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Record {
    pub id: String,
    pub suite: String,
    pub check: String,
    pub anchor: String,
    pub inputs_digest: String,
    pub pass: bool,
    pub checked: usize,
    pub failed: usize,
    pub counterexample: Option<CounterexampleOut>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub model: String,
    pub seed: u64,
    pub config_digest: String,
    pub suites: Vec<String>,
    pub pass: bool,
    pub records: Vec<Record>,
}

pub fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

pub fn record(config: &str, suite: &str, o: Outcome) -> Record {
    let anchor = catalog::find(o.id).map(|e| e.anchor).unwrap_or_default();
    Record {
        id: o.id.to_string(),
        suite: suite.to_string(),
        inputs_digest: digest(&[config, suite, o.id, &o.report.name]),
        pass: o.report.passed(),
        checked: o.report.checked,
        failed: o.report.failed,
        counterexample: o
            .report
            .smallest_failure()
            .map(|c| CounterexampleOut { input: c.input.clone(), detail: c.detail.clone() }),
        check: o.report.name,
        anchor: anchor.to_string(),
        wall_ms: o.wall_ms,
    }
}

impl Record {
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {:<24} {} ({} cases)", self.id, self.check, self.checked);
        if let Some(c) = &self.counterexample {
            s.push_str(&format!("\n     violates \"{}\": {} -> {}", self.anchor, c.input, c.detail));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_parts() {
        assert_ne!(digest(&["ab", "c"]), digest(&["a", "bc"]));
        assert_eq!(digest(&["x"]).len(), 64);
    }
}

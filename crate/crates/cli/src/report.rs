//! Machine-readable run report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::checks::CheckRecord;
use crate::config::{RunConfig, Scenario};

pub const TOOL: &str = "sigma-forge";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    /// The configuration the run used, after command-line overrides of the
    /// seed.
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    /// Scenario-specific results (tensors, error tables, fitted orders).
    pub data: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    /// Conjunction of every check.
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(scenario: Scenario, config: RunConfig, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario,
            config,
            checks,
            data: BTreeMap::new(),
            warnings: Vec::new(),
            pass,
            timings: None,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with a trailing newline. Map keys are sorted, so equal
    /// reports serialise to equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let value = c.value.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
            out.push_str(&format!(
                "{} {:<32} {:>11}  {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                value,
                c.tag
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.scenario,
            if self.pass { "pass" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::Recorder;

    #[test]
    fn pass_is_conjunction() {
        let cfg = RunConfig::from_toml_str("algebra = \"su2\"").unwrap();
        let mut rec = Recorder::default();
        rec.record("structure.antisymmetry", 0.0);
        rec.record("structure.jacobi", 1.0);
        let r = Report::new(Scenario::Validate, cfg, rec.into_records());
        assert!(!r.pass);
        assert!(r.summary().contains("FAIL structure.jacobi"));
    }

    #[test]
    fn json_round_trip_and_no_timings_by_default() {
        let cfg = RunConfig::from_toml_str("algebra = \"su2\"").unwrap();
        let r = Report::new(Scenario::Validate, cfg, Vec::new());
        let json = r.to_json();
        assert!(!json.contains("\"timings\""));
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

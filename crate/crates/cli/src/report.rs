//! Report envelope shared by every subcommand.

use std::fmt::Write as _;

use opcstar_core::check::{CheckRecord, Verdict};
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub null_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

/// Field order here is the JSON field order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub theory: String,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub data: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(command: &str, theory: &str, tolerances: Tolerances, seed: Option<u64>) -> Self {
        Report {
            schema: SCHEMA,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            theory: theory.to_string(),
            tolerances,
            seed,
            passed: true,
            checks: Vec::new(),
            data: Map::new(),
            timings: None,
        }
    }

    pub fn with_suite(mut self, suite: opcstar_core::suites::Suite) -> Self {
        self.checks.extend(suite.checks);
        self.data.extend(suite.data);
        self.passed = opcstar_core::check::all_passed(&self.checks);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} on {}", self.tool, self.command, self.theory);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Informational => "INFO",
            };
            let _ = write!(
                out,
                "{tag}  {:<width$}  {:.3e} (threshold {:.1e})",
                c.name, c.residual, c.threshold
            );
            if let Some(d) = &c.detail {
                let _ = write!(out, "  {d}");
            }
            out.push('\n');
        }
        let failed = self
            .checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .count();
        let info = self
            .checks
            .iter()
            .filter(|c| c.verdict == Verdict::Informational)
            .count();
        let _ = writeln!(
            out,
            "{}: {} checks, {failed} failed, {info} informational",
            if self.passed { "ok" } else { "FAILED" },
            self.checks.len()
        );
        if let Some(t) = &self.timings {
            let _ = writeln!(out, "time: {:.1} ms", t.total_ms);
        }
        out
    }
}

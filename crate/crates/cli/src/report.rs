use std::fmt::Write as _;
use std::time::Duration;

use nforge_core::neron::Check;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub truncation_order: Option<u32>,
    pub monomial_order: String,
    pub degree_budget: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEcho {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

impl From<&CliError> for ErrorEcho {
    fn from(e: &CliError) -> Self {
        Self { kind: e.kind().to_string(), message: e.to_string(), location: e.location().map(String::from) }
    }
}

/// Timing is not part of the machine report, so reruns stay byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub problem_sha256: String,
    pub options: OptionsEcho,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorEcho>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn settle(&mut self) {
        self.status = if self.error.is_some() {
            Status::Error
        } else if self.checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    /// Canonical JSON: keys sorted at every level, two-space indent.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        let mut out = serde_json::to_string_pretty(&v).expect("values serialize");
        out.push('\n');
        out
    }

    pub fn to_pretty(&self, elapsed: Option<Duration>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nforge {}  (schema {})", self.command, self.schema_version);
        let _ = writeln!(out, "problem  sha256:{}", self.problem_sha256);
        let o = &self.options;
        let trunc = o.truncation_order.map_or("file".to_string(), |n| n.to_string());
        let _ = writeln!(out, "options  truncation={trunc} order={} budget={} seed={}", o.monomial_order, o.degree_budget, o.seed);
        out.push('\n');
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).clamp(5, 56);
            let _ = writeln!(out, "  #  result  {:<width$}  detail", "check");
            for (i, c) in self.checks.iter().enumerate() {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{:>3}  {mark:<6}  {:<width$}  {}", i + 1, c.name, shorten(&c.detail, 96));
            }
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {} {}", e.kind, e.message);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = write!(out, "{status}: {passed}/{} checks passed", self.checks.len());
        if let Some(t) = elapsed {
            let _ = write!(out, " in {:.3} s", t.as_secs_f64());
        }
        out.push('\n');
        out
    }
}

fn shorten(s: &str, max: usize) -> String {
    let one_line = s.replace('\n', " ");
    if one_line.chars().count() <= max {
        return one_line;
    }
    let mut t: String = one_line.chars().take(max - 3).collect();
    t.push_str("...");
    t
}

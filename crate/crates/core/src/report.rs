//! Structured outcome of a single verification.

use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub status: Status,
    pub witness: Value,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Ordering key: check name, then the canonical parameter string.
    pub fn sort_key(&self) -> (String, String) {
        (self.check.clone(), Value::Object(self.params.clone()).to_string())
    }
}

/// Outcome of a check body: pass/fail plus a witness.
pub type Outcome = Result<(bool, Value), String>;

/// Runs `body`, timing it and packaging the result.
pub fn run_check(check: &str, params: Value, body: impl FnOnce() -> Outcome) -> CheckReport {
    let start = Instant::now();
    let outcome = body();
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let params = match params {
        Value::Object(m) => m,
        Value::Null => Map::new(),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    let (status, witness) = match outcome {
        Ok((true, w)) => (Status::Pass, w),
        Ok((false, w)) => (Status::Fail, w),
        Err(e) => (Status::Error, Value::String(e)),
    };
    CheckReport {
        check: check.to_string(),
        params,
        status,
        witness,
        elapsed_ms,
    }
}

/// Reports in deterministic order.
pub fn sorted(mut reports: Vec<CheckReport>) -> Vec<CheckReport> {
    reports.sort_by_cached_key(|r| r.sort_key());
    reports
}

/// JSON array of the reports.
pub fn to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// One line per report.
pub fn to_text(reports: &[CheckReport]) -> String {
    if reports.is_empty() {
        return "no checks run\n".to_string();
    }
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "[{}] {} {} ({} ms)\n    {}\n",
            r.status.as_str().to_uppercase(),
            r.check,
            Value::Object(r.params.clone()),
            r.elapsed_ms,
            r.witness
        ));
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    out.push_str(&format!("{passed}/{} checks passed\n", reports.len()));
    out
}

//! Checks and the report document every command produces.

use serde::Serialize;

use crate::config::ConfigEcho;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub name: String,
    pub status: Status,
    /// `None` for yes/no checks and for wall-clock times (kept out of reports).
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    /// How `value` is compared with `tolerance`.
    pub relation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, value: Option<f64>, tolerance: Option<f64>, relation: &'static str) -> Self {
        Self {
            criterion: None,
            name: name.into(),
            status: Status::from_bool(ok),
            value,
            tolerance,
            relation,
            detail: None,
        }
    }

    /// `value < tol` (NaN fails).
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value < tol, Some(value), Some(tol), "<")
    }

    /// `value <= tol`.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value <= tol, Some(value), Some(tol), "<=")
    }

    /// `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value >= bound, Some(value), Some(bound), ">=")
    }

    /// `|value - target| <= tol`; the reported value is the measured one.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let mut c = Self::new(name, (value - target).abs() <= tol, Some(value), Some(tol), "|x - target| <=");
        c.detail = Some(format!("target {target}"));
        c
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, ok, None, None, "holds")
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn for_criterion(mut self, id: u8) -> Self {
        self.criterion = Some(id);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `PASS name value (relation tol)`.
    pub fn line(&self) -> String {
        let mut s = format!("{} {}", self.status.label(), self.name);
        if let Some(v) = self.value {
            s.push_str(&format!(" = {v:.6e}"));
        }
        if let Some(t) = self.tolerance {
            s.push_str(&format!(" ({} {t:e})", self.relation));
        }
        if let Some(d) = &self.detail {
            s.push_str(&format!(" [{d}]"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub kind: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: Status,
    pub config: ConfigEcho,
    pub checks: Vec<Check>,
    /// Command-specific results.
    pub results: serde_json::Value,
    pub manifest: Vec<ManifestEntry>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, config: ConfigEcho, checks: Vec<Check>, results: serde_json::Value) -> Self {
        let status = Status::from_bool(checks.iter().all(Check::passed));
        Self {
            tool: "scurve",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            status,
            config,
            checks,
            results,
            manifest: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

//! Experiment reports: sample tables, fits, named metrics, and pass/fail
//! checks, serialised as JSON with a versioned schema and as CSV tables.

use crate::quad::LineFit;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Bumped whenever a field of [`ExperimentReport`] (or a nested type) changes.
pub const REPORT_SCHEMA_VERSION: &str = "1.0.0";

/// Library modules and their versions, embedded in every report.
pub const MODULE_VERSIONS: &[(&str, &str)] = &[
    ("params", "1.0.0"),
    ("field", "1.0.0"),
    ("littlewood_paley", "1.0.0"),
    ("propagator", "1.0.0"),
    ("oscillatory", "1.0.0"),
    ("bipolar_kernel", "1.0.0"),
    ("ground_state", "1.0.0"),
    ("dynamics", "1.0.0"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.serialize(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }
}

/// A least-squares fit with the value it is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FitRecord {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residual: f64,
    pub slope_stderr: f64,
    pub points: usize,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
}

impl FitRecord {
    pub fn new(name: &str, fit: &LineFit, target: Option<f64>, tolerance: Option<f64>) -> Self {
        Self {
            name: name.to_string(),
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            residual: fit.residual,
            slope_stderr: fit.slope_stderr,
            points: fit.points,
            target,
            tolerance,
        }
    }

    pub fn within_target(&self) -> Option<bool> {
        match (self.target, self.tolerance) {
            (Some(t), Some(tol)) => Some((self.slope - t).abs() <= tol),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub reason: Option<String>,
}

impl Check {
    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: value <= threshold,
            value: Some(value),
            threshold: Some(threshold),
            reason: None,
        }
    }

    /// Passes when `value ≥ threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: value >= threshold,
            value: Some(value),
            threshold: Some(threshold),
            reason: None,
        }
    }

    /// Passes when |value − target| ≤ tolerance.
    pub fn near(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: (value - target).abs() <= tolerance,
            value: Some(value),
            threshold: Some(tolerance),
            reason: Some(format!("target {target}")),
        }
    }

    pub fn flag(name: &str, pass: bool, reason: Option<String>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            value: None,
            threshold: None,
            reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub experiment: String,
    pub module_versions: BTreeMap<String, String>,
    /// Echo of the inputs that produced the report.
    pub inputs: serde_json::Value,
    /// SHA-256 of the canonical JSON encoding of `inputs`.
    pub config_hash: String,
    pub tables: Vec<Table>,
    pub fits: Vec<FitRecord>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new<T: Serialize>(experiment: &str, inputs: &T) -> Self {
        let inputs = serde_json::to_value(inputs).unwrap_or(serde_json::Value::Null);
        Self {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            experiment: experiment.to_string(),
            module_versions: MODULE_VERSIONS
                .iter()
                .map(|(m, v)| (m.to_string(), v.to_string()))
                .collect(),
            config_hash: config_hash(&inputs),
            inputs,
            tables: Vec::new(),
            fits: Vec::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn fit(&self, name: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!("experiment: {}\nconfig hash: {}\n", self.experiment, self.config_hash);
        for f in &self.fits {
            s += &format!("fit {}: slope {:.6} (R² {:.6}, {} points)", f.name, f.slope, f.r_squared, f.points);
            if let Some(t) = f.target {
                s += &format!(", target {t:.6}");
            }
            s += "\n";
        }
        for (k, v) in &self.metrics {
            s += &format!("{k}: {v:.6e}\n");
        }
        for c in &self.checks {
            s += &format!("[{}] {}", if c.pass { "pass" } else { "FAIL" }, c.name);
            if let Some(v) = c.value {
                s += &format!(" value={v:.6e}");
            }
            if let Some(t) = c.threshold {
                s += &format!(" threshold={t:.3e}");
            }
            if let Some(r) = &c.reason {
                s += &format!(" ({r})");
            }
            s += "\n";
        }
        for w in &self.warnings {
            s += &format!("warning: {w}\n");
        }
        s += &format!("overall: {}\n", if self.passed() { "pass" } else { "FAIL" });
        s
    }
}

pub fn config_hash(value: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(value).expect("value serialises");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// JSON schema of [`ExperimentReport`], tagged with its version.
pub fn report_schema() -> serde_json::Value {
    let mut schema = serde_json::to_value(schemars::schema_for!(ExperimentReport)).expect("schema serialises");
    if let Some(obj) = schema.as_object_mut() {
        obj.insert(
            "$id".into(),
            serde_json::Value::String(format!("urn:biharm:experiment-report:{REPORT_SCHEMA_VERSION}")),
        );
        obj.insert(
            "version".into(),
            serde_json::Value::String(REPORT_SCHEMA_VERSION.to_string()),
        );
    }
    schema
}

/// SHA-256 of the schema body without its version tags; the versioning test
/// pins this per version.
pub fn schema_fingerprint() -> String {
    config_hash(&serde_json::to_value(schemars::schema_for!(ExperimentReport)).expect("schema serialises"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_only_on_inputs() {
        let a = ExperimentReport::new("x", &serde_json::json!({"n": 5, "p": 3.0}));
        let b = ExperimentReport::new("y", &serde_json::json!({"p": 3.0, "n": 5}));
        assert_eq!(a.config_hash, b.config_hash);
        let c = ExperimentReport::new("x", &serde_json::json!({"n": 6, "p": 3.0}));
        assert_ne!(a.config_hash, c.config_hash);
    }

    #[test]
    fn checks_combine() {
        let mut r = ExperimentReport::new("x", &());
        assert!(r.passed());
        r.check(Check::at_most("small", 1.0, 2.0));
        assert!(r.passed());
        r.check(Check::near("slope", -1.0, -1.25, 0.05));
        assert!(!r.passed());
        assert!(r.summary().contains("FAIL"));
    }

    #[test]
    fn table_csv() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(t.to_csv(), "a,b\n1.0,0.5\n");
    }
}

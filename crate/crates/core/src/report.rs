//! Residual checks and the report they are collected into.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// One named residual check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// Name of the geometric relation being checked.
    #[serde(rename = "paper_ref")]
    pub relation: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Advisory checks are reported but do not decide the overall verdict.
    #[serde(skip)]
    pub gating: bool,
    pub notes: String,
}

impl Check {
    /// `pass` is `max_residual < tolerance`; a NaN residual fails.
    pub fn new(id: impl Into<String>, relation: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Check {
            id: id.into(),
            relation: relation.into(),
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
            gating: true,
            notes: String::new(),
        }
    }

    /// Mark as not deciding the overall verdict; noted in the output.
    pub fn advisory(mut self) -> Self {
        self.gating = false;
        self.note("advisory")
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        let text = text.as_ref();
        if !text.is_empty() {
            if !self.notes.is_empty() {
                self.notes.push_str("; ");
            }
            self.notes.push_str(text);
        }
        self
    }
}

/// Ordered list of checks plus free-form verdicts.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub verdicts: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.pass)
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.verdicts.extend(other.verdicts);
    }

    pub fn verdict(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.verdicts.insert(key.into(), value.into());
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.gating && !c.pass)
    }
}

/// Maximum of `values`; NaN if any value is NaN or the iterator is empty.
pub fn max_residual<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut out: Option<f64> = None;
    for v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        out = Some(out.map_or(v, |m: f64| m.max(v)));
    }
    out.unwrap_or(f64::NAN)
}

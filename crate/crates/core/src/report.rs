//! Tolerance-tagged findings and the reports the verifiers emit.

use serde::Serialize;
use std::fmt;

/// A single named check: a measured value compared against a tolerance.
///
/// The meaning of `value` depends on the check. For residual-style checks
/// (`pass` iff `value <= tol`) it is a violation magnitude; for
/// strictness-style checks (`pass` iff `value > tol`) it is the quantity
/// that must stay away from zero. The constructor fixes the direction.
#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub locus: String,
}

impl Finding {
    /// Passes when the measured violation is within tolerance.
    pub fn residual(name: impl Into<String>, value: f64, tol: f64, locus: impl Into<String>) -> Self {
        Finding {
            name: name.into(),
            value,
            tol,
            pass: value.abs() <= tol,
            locus: locus.into(),
        }
    }

    /// Passes when the measured quantity exceeds the tolerance.
    pub fn strictness(name: impl Into<String>, value: f64, tol: f64, locus: impl Into<String>) -> Self {
        Finding {
            name: name.into(),
            value,
            tol,
            pass: value > tol,
            locus: locus.into(),
        }
    }
}

/// Outcome of a verifier run: findings plus an overall verdict string.
///
/// The verdict is `ok_verdict` iff every finding passes.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub findings: Vec<Finding>,
    pub verdict: String,
}

impl VerificationReport {
    pub fn new(findings: Vec<Finding>) -> Self {
        Self::with_verdicts(findings, "pass", "fail")
    }

    pub fn with_verdicts(findings: Vec<Finding>, ok_verdict: &str, fail_verdict: &str) -> Self {
        let all_pass = findings.iter().all(|f| f.pass);
        VerificationReport {
            findings,
            verdict: if all_pass { ok_verdict.into() } else { fail_verdict.into() },
        }
    }

    /// Report with a fixed verdict, e.g. when evaluation was refused.
    pub fn refused(findings: Vec<Finding>, verdict: &str) -> Self {
        VerificationReport {
            findings,
            verdict: verdict.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Plain-text table, byte-stable for identical inputs.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let name_w = self
            .findings
            .iter()
            .map(|f| f.name.len())
            .chain(std::iter::once("finding".len()))
            .max()
            .unwrap_or(7);
        out.push_str(&format!(
            "{:<name_w$}  {:>14}  {:>9}  {:<4}  locus\n",
            "finding", "value", "tol", "pass"
        ));
        for f in &self.findings {
            out.push_str(&format!(
                "{:<name_w$}  {:>14.6e}  {:>9.1e}  {:<4}  {}\n",
                f.name,
                f.value,
                f.tol,
                if f.pass { "yes" } else { "NO" },
                f.locus
            ));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

//! Check records and their JSON / CSV encodings.
//!
//! Both encodings carry the same columns:
//! `check, inputs, observed, bound, tolerance, passed, detail`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    #[serde(rename = "check")]
    pub name: String,
    pub inputs: String,
    pub observed: f64,
    #[serde(rename = "bound")]
    pub bound_or_expected: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    /// Passes when `observed ≤ bound + tolerance`.
    pub fn at_most(
        name: &str,
        inputs: impl Into<String>,
        observed: f64,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            inputs: inputs.into(),
            observed,
            bound_or_expected: bound,
            tolerance,
            passed: observed <= bound + tolerance,
            detail: String::new(),
        }
    }

    /// Passes when `|observed − expected| ≤ tolerance`.
    pub fn close_to(
        name: &str,
        inputs: impl Into<String>,
        observed: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            passed: (observed - expected).abs() <= tolerance,
            ..Self::at_most(name, inputs, observed, expected, tolerance)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Fails the check unless `cond`, recording `why` in the detail.
    pub fn require(mut self, cond: bool, why: &str) -> Self {
        if !cond {
            self.passed = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str("FAILED: ");
            self.detail.push_str(why);
        }
        self
    }
}

/// A full verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub elapsed_ms: u64,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

pub fn write_csv<W: Write>(checks: &[CheckResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in checks {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<CheckResult>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_share_columns() {
        let checks = vec![
            CheckResult::at_most("a.b", "n=4", 0.25, 0.5, 1e-12).with_detail("x, \"quoted\""),
            CheckResult::close_to("c", "", 1.0, 2.0, 0.1),
        ];
        assert!(checks[0].passed);
        assert!(!checks[1].passed);

        let mut buf = Vec::new();
        write_csv(&checks, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("check,inputs,observed,bound,tolerance,passed,detail\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), checks);

        let json = serde_json::to_value(&checks[0]).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for col in [
            "check",
            "inputs",
            "observed",
            "bound",
            "tolerance",
            "passed",
            "detail",
        ] {
            assert!(keys.contains(&col.to_string()), "{col}");
        }
    }

    #[test]
    fn require_marks_failure() {
        let c = CheckResult::at_most("x", "", 0.0, 1.0, 0.0).require(false, "side condition");
        assert!(!c.passed);
        assert!(c.detail.contains("side condition"));
    }
}

//! Versioned JSON verification reports.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Pass,
    Fail,
}

/// One checked property. `margin` is positive when the check holds with room to spare
/// and negative by the amount it is violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub status: CaseStatus,
    pub margin: f64,
    pub details: Value,
}

impl Case {
    /// A check of `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, details: Value) -> Self {
        Self::from_margin(name, bound - measured, details)
    }

    /// A check of `measured >= bound`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64, details: Value) -> Self {
        Self::from_margin(name, measured - bound, details)
    }

    /// A check that `measured` lies in `[lo, hi]`.
    pub fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64, details: Value) -> Self {
        Self::from_margin(name, (measured - lo).min(hi - measured), details)
    }

    /// Passes on a non-negative margin. Non-finite margins are clamped to the finite
    /// range so the report stays valid JSON, NaN counting as the worst failure.
    pub fn from_margin(name: impl Into<String>, margin: f64, details: Value) -> Self {
        let margin = if margin.is_nan() {
            f64::MIN
        } else {
            margin.clamp(f64::MIN, f64::MAX)
        };
        let status = if margin >= 0.0 {
            CaseStatus::Pass
        } else {
            CaseStatus::Fail
        };
        Case {
            name: name.into(),
            status,
            margin,
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CaseStatus::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Run information that legitimately differs between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generated_at_unix: u64,
    pub crate_version: String,
}

impl Metadata {
    pub fn now() -> Self {
        Metadata {
            generated_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub cases: Vec<Case>,
    pub summary: Summary,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(suite: impl Into<String>, cases: Vec<Case>) -> Self {
        let passed = cases.iter().filter(|c| c.passed()).count();
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            suite: suite.into(),
            summary: Summary {
                total: cases.len(),
                passed,
                failed: cases.len() - passed,
            },
            cases,
            metadata: Metadata::now(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// The report without `metadata`; equal for identical runs.
    pub fn comparable_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Value::Object(map) = &mut v {
            map.remove("metadata");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn margins_and_summary() {
        let cases = vec![
            Case::at_most("a", 1e-12, 1e-10, json!({})),
            Case::at_least("b", 0.5, 1.0, json!({})),
            Case::within("c", -0.5, -0.65, -0.35, json!({})),
            Case::from_margin("nan", f64::NAN, json!({})),
        ];
        let r = Report::new("demo", cases);
        assert_eq!(r.summary, Summary { total: 4, passed: 2, failed: 2 });
        assert!(!r.all_passed());
    }

    #[test]
    fn comparable_json_drops_metadata() {
        let a = Report::new("demo", vec![Case::at_most("a", 0.0, 1.0, json!({"k": 1}))]);
        let mut b = a.clone();
        b.metadata.generated_at_unix += 100;
        assert_ne!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.comparable_json().unwrap(), b.comparable_json().unwrap());
        assert!(!a.comparable_json().unwrap().contains("metadata"));
    }
}

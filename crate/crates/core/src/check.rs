use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Measured and reported, never counted as a failure.
    Informational,
}

/// One named check with its measured residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub verdict: Verdict,
    pub residual: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    /// Passes iff `residual <= threshold`; NaN fails.
    pub fn against(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let verdict = if residual <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckRecord {
            name: name.into(),
            verdict,
            residual,
            threshold,
            detail: None,
        }
    }

    pub fn boolean(name: impl Into<String>, ok: bool, residual: f64) -> Self {
        CheckRecord {
            name: name.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            residual,
            threshold: 0.0,
            detail: None,
        }
    }

    pub fn informational(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            verdict: Verdict::Informational,
            residual: value,
            threshold,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// True iff no record failed.
pub fn all_passed(records: &[CheckRecord]) -> bool {
    records.iter().all(CheckRecord::passed)
}

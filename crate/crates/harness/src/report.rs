//! Verification reports: one entry per check, appended in run order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// The inequality or property under test, in words.
    pub statement: String,
    /// First 16 hex digits of the SHA-256 of the canonical inputs.
    pub inputs_digest: String,
    pub measured: BTreeMap<String, f64>,
    pub tolerance: String,
    pub verdict: Verdict,
    /// The check passes because an operation was rejected as intended.
    #[serde(default)]
    pub expected_reject: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    /// Wall time of the check; the only field that varies between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl Check {
    pub fn new(
        id: impl Into<String>,
        statement: impl Into<String>,
        inputs: &impl Serialize,
    ) -> Self {
        Check {
            id: id.into(),
            statement: statement.into(),
            inputs_digest: digest(inputs),
            measured: BTreeMap::new(),
            tolerance: String::new(),
            verdict: Verdict::Undecided,
            expected_reject: false,
            note: String::new(),
            seconds: None,
        }
    }

    /// Records a value; `±∞` and `NaN` become flags, since JSON has no encoding for them.
    pub fn measure(mut self, key: impl Into<String>, value: f64) -> Self {
        let key = key.into();
        if value.is_finite() {
            self.measured.insert(key, value);
        } else if value.is_nan() {
            self.measured.insert(format!("{key}_is_nan"), 1.0);
        } else {
            self.measured
                .insert(format!("{key}_is_infinite"), value.signum());
        }
        self
    }

    pub fn tolerance(mut self, tol: impl Into<String>) -> Self {
        self.tolerance = tol.into();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn timed(mut self, seconds: f64) -> Self {
        self.seconds = Some(seconds);
        self
    }

    pub fn verdict(mut self, ok: bool) -> Self {
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        self
    }

    pub fn undecided(mut self) -> Self {
        self.verdict = Verdict::Undecided;
        self
    }

    pub fn expected_reject(mut self) -> Self {
        self.expected_reject = true;
        self
    }

    /// A module error turned into a failing entry.
    pub fn failed_with(mut self, err: &dyn fmt::Display) -> Self {
        self.verdict = Verdict::Fail;
        self.note = format!("error: {err}");
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// SHA-256 of the compact JSON form, truncated to 16 hex digits.
pub fn digest(inputs: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(inputs).unwrap_or_default();
    let hash = Sha256::digest(&bytes);
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub undecided: usize,
}

impl SuiteSummary {
    pub fn total(&self) -> usize {
        self.passed + self.failed + self.undecided
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.undecided == 0 && self.total() > 0
    }
}

/// Checks grouped by section (operation or suite); entries can be added but not removed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    sections: Vec<(String, Vec<Check>)>,
}

impl VerificationReport {
    pub fn new(seed: u64) -> Self {
        VerificationReport {
            seed,
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: &str, check: Check) {
        match self.sections.iter_mut().find(|(name, _)| name == section) {
            Some((_, checks)) => checks.push(check),
            None => self.sections.push((section.to_string(), vec![check])),
        }
    }

    pub fn extend(&mut self, section: &str, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(section, c);
        }
    }

    pub fn sections(&self) -> impl Iterator<Item = (&str, &[Check])> {
        self.sections
            .iter()
            .map(|(n, c)| (n.as_str(), c.as_slice()))
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|(_, c)| c.iter())
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn summary(&self) -> Vec<SuiteSummary> {
        self.sections
            .iter()
            .map(|(name, checks)| {
                let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
                SuiteSummary {
                    name: name.clone(),
                    passed: count(Verdict::Pass),
                    failed: count(Verdict::Fail),
                    undecided: count(Verdict::Undecided),
                }
            })
            .collect()
    }

    pub fn any_failed(&self) -> bool {
        self.checks().any(|c| c.verdict == Verdict::Fail)
    }

    /// The report with wall times removed, for run-to-run comparison.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for (_, checks) in &mut out.sections {
            for c in checks {
                c.seconds = None;
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        #[derive(Serialize)]
        struct Stored<'a> {
            seed: u64,
            summary: Vec<SuiteSummary>,
            sections: &'a [(String, Vec<Check>)],
        }
        serde_json::to_string_pretty(&Stored {
            seed: self.seed,
            summary: self.summary(),
            sections: &self.sections,
        })
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        #[derive(Deserialize)]
        struct Stored {
            seed: u64,
            sections: Vec<(String, Vec<Check>)>,
        }
        let s: Stored = serde_json::from_str(text)?;
        Ok(VerificationReport {
            seed: s.seed,
            sections: s.sections,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_short() {
        let a = digest(&("delta", 0.5));
        assert_eq!(a, digest(&("delta", 0.5)));
        assert_ne!(a, digest(&("delta", 0.25)));
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn sections_keep_order_and_round_trip() {
        let mut r = VerificationReport::new(3);
        r.push("b", Check::new("b1", "x", &1).verdict(true));
        r.push("a", Check::new("a1", "y", &2).verdict(false).timed(0.5));
        r.push("b", Check::new("b2", "z", &3).undecided());
        let s = r.summary();
        assert_eq!(s[0].name, "b");
        assert_eq!((s[0].passed, s[0].undecided, s[1].failed), (1, 1, 1));
        assert!(r.any_failed());
        let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(back.without_timings().checks().all(|c| c.seconds.is_none()));
    }

    #[test]
    fn empty_report_has_no_failures() {
        let r = VerificationReport::new(0);
        assert!(r.is_empty());
        assert!(!r.any_failed());
    }
}

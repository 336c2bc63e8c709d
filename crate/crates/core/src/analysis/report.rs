//! Uniform result record for property checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Preconditions not met; nothing was checked.
    Skipped,
    /// Ran, but the searched-for quantity was not found among the candidates.
    Inconclusive,
}

impl CheckStatus {
    /// Statuses that do not count as a failure of the suite.
    pub fn is_ok(self) -> bool {
        self != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub passed: bool,
    pub status: CheckStatus,
    pub n_samples: usize,
    pub worst_violation: f64,
    pub witness: Option<Vec<f64>>,
    pub constants_used: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, seed: u64) -> Self {
        CheckReport {
            check_id: check_id.into(),
            passed: false,
            status: CheckStatus::Skipped,
            n_samples: 0,
            worst_violation: 0.0,
            witness: None,
            constants_used: BTreeMap::new(),
            seed,
            note: None,
        }
    }

    pub fn constant(mut self, name: &str, value: f64) -> Self {
        self.constants_used.insert(name.to_string(), value);
        self
    }

    pub fn set_constant(&mut self, name: &str, value: f64) {
        self.constants_used.insert(name.to_string(), value);
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Marks the check as not run.
    pub fn skipped(mut self, reason: impl Into<String>) -> Self {
        self.status = CheckStatus::Skipped;
        self.passed = false;
        self.note = Some(reason.into());
        self
    }

    /// Settles pass/fail from the tracked violation and `tolerance`.
    pub fn conclude(mut self, tolerance: f64) -> Self {
        self.set_constant("tolerance", tolerance);
        self.passed = self.worst_violation <= tolerance;
        self.status = if self.passed { CheckStatus::Pass } else { CheckStatus::Fail };
        if self.passed {
            self.witness = self.witness.filter(|_| self.worst_violation > 0.0);
        }
        self
    }
}

/// Tracks the largest violation and the input producing it.
#[derive(Debug, Clone, Default)]
pub struct Worst {
    pub value: f64,
    pub witness: Option<Vec<f64>>,
    pub count: usize,
}

impl Worst {
    pub fn observe(&mut self, violation: f64, witness: impl FnOnce() -> Vec<f64>) {
        self.count += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.value {
            self.value = v;
            self.witness = Some(witness());
        }
    }

    pub fn merge(&mut self, other: Worst) {
        self.count += other.count;
        if other.value > self.value {
            self.value = other.value;
            self.witness = other.witness;
        }
    }

    pub fn apply(self, mut report: CheckReport) -> CheckReport {
        report.n_samples += self.count;
        report.worst_violation = report.worst_violation.max(self.value);
        if self.witness.is_some() && self.value >= report.worst_violation {
            report.witness = self.witness;
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conclude_sets_status() {
        let mut w = Worst::default();
        w.observe(0.0, || vec![1.0]);
        w.observe(2e-3, || vec![2.0]);
        w.observe(1e-3, || vec![3.0]);
        let r = w.clone().apply(CheckReport::new("x", 1)).conclude(1e-2);
        assert!(r.passed);
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.n_samples, 3);
        let r = w.apply(CheckReport::new("x", 1)).conclude(1e-4);
        assert!(!r.passed);
        assert_eq!(r.witness, Some(vec![2.0]));
    }

    #[test]
    fn serializes_required_fields() {
        let r = CheckReport::new("kappa", 7).constant("kappa_hat", 0.99).conclude(0.0);
        let j = serde_json::to_value(&r).unwrap();
        for k in ["check_id", "passed", "n_samples", "worst_violation", "witness", "constants_used", "seed"] {
            assert!(j.get(k).is_some(), "{k}");
        }
        assert_eq!(j["status"], "pass");
    }
}

//! Numerical certification of equivalences and identities on concrete
//! trajectories, collected into a pass/fail report.

mod action;
mod riccati;
mod rigid;

use serde::{Deserialize, Serialize};

pub use action::check_action_equality;
pub use riccati::{
    audit_closed_loop, check_closed_form, check_cross_ratio, check_lie_closure, cross_ratio,
    AuditPoint,
};
pub use rigid::{check_conservation, check_equivalence_rigid, check_rk4_order, rigid_lift};

/// Absolute floor and `h²` coefficient of the differential residual
/// tolerances: `max(1e-6, 10 h²)`.
pub const DIFFERENTIAL_FLOOR: f64 = 1e-6;
pub const DIFFERENTIAL_COEFF: f64 = 10.0;

pub(crate) fn differential_tolerance(h: f64) -> f64 {
    DIFFERENTIAL_FLOOR.max(DIFFERENTIAL_COEFF * h * h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: String,
}

impl CheckEntry {
    /// `passed` is `max_residual ≤ tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
            details: details.into(),
        }
    }
}

/// An observation that is reported but never gates the outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub max_deviation: f64,
    pub details: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckEntry>,
    pub findings: Vec<Finding>,
    pub scenario_digest: Option<String>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.checks.push(entry);
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = CheckEntry>) {
        self.checks.extend(entries);
    }

    pub fn note(&mut self, finding: Finding) {
        self.findings.push(finding);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        assert!(CheckEntry::new("a", 1e-9, 1e-8, "").passed);
        assert!(CheckEntry::new("a", 1e-8, 1e-8, "").passed);
        assert!(!CheckEntry::new("a", 2e-8, 1e-8, "").passed);
        assert!(!CheckEntry::new("a", f64::NAN, 1e-8, "").passed);
        let mut r = VerificationReport::new();
        assert!(r.passed());
        r.push(CheckEntry::new("b", f64::INFINITY, 1.0, ""));
        r.note(Finding { name: "f".into(), max_deviation: 3.0, details: String::new() });
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn tolerance_scales_with_step() {
        assert_eq!(differential_tolerance(1e-4), 1e-6);
        assert!((differential_tolerance(1e-2) - 1e-3).abs() < 1e-18);
    }
}

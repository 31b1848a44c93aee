use serde::Serialize;

use crate::Tolerances;

/// One inequality from a genericity or simplicity list, evaluated at an event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityCheck {
    pub condition: String,
    pub value: f64,
    pub pass: bool,
    /// Passed, but by less than three orders of magnitude over the threshold.
    pub near_threshold: bool,
}

impl GenericityCheck {
    /// The condition `value ≠ 0`, judged against the derivative threshold.
    pub fn nonzero(condition: impl Into<String>, value: f64, tol: &Tolerances) -> Self {
        let pass = value.abs() > tol.deriv;
        GenericityCheck {
            condition: condition.into(),
            value,
            pass,
            near_threshold: pass && value.abs() < 1e3 * tol.deriv,
        }
    }

    /// The condition `value > 0`.
    pub fn positive(condition: impl Into<String>, value: f64, tol: &Tolerances) -> Self {
        let pass = value > tol.deriv;
        GenericityCheck {
            condition: condition.into(),
            value,
            pass,
            near_threshold: pass && value < 1e3 * tol.deriv,
        }
    }
}

pub fn all_pass(checks: &[GenericityCheck]) -> bool {
    checks.iter().all(|c| c.pass)
}

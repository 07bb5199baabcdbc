//! Pass/fail condition checks shared by the validity diagnostics.

use serde::Serialize;

use crate::scalar::Real;

/// One evaluated inequality, `lhs` compared against `rhs`.
///
/// `margin` is the ratio by which the condition is satisfied (> 1 means the
/// inequality holds with room to spare); `pass` applies the per-condition
/// threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    pub margin: T,
    pub pass: bool,
}

impl<T: Real> ConditionCheck<T> {
    /// `lhs` must be well below `rhs`: margin = rhs/lhs, pass when margin >= factor.
    pub fn much_less(name: &str, lhs: T, rhs: T, factor: T) -> Self {
        let margin = if lhs > T::zero() {
            rhs / lhs
        } else {
            T::infinity()
        };
        ConditionCheck {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            pass: margin >= factor,
        }
    }

    /// Plain strict `lhs < rhs`: margin = rhs/lhs.
    pub fn less(name: &str, lhs: T, rhs: T) -> Self {
        let margin = if lhs > T::zero() {
            rhs / lhs
        } else {
            T::infinity()
        };
        ConditionCheck {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            pass: lhs < rhs,
        }
    }

    /// Plain strict `lhs > rhs`: margin = lhs/rhs.
    pub fn greater(name: &str, lhs: T, rhs: T) -> Self {
        let margin = if rhs > T::zero() {
            lhs / rhs
        } else {
            T::infinity()
        };
        ConditionCheck {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            pass: lhs > rhs,
        }
    }
}

/// Render a slice of checks as a plain-text table.
pub fn render_table<T: Real>(checks: &[ConditionCheck<T>]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<32} {:>14} {:>14} {:>10} {:>6}\n",
        "condition", "lhs", "rhs", "margin", "pass"
    ));
    for c in checks {
        out.push_str(&format!(
            "{:<32} {:>14.6e} {:>14.6e} {:>10.3e} {:>6}\n",
            c.name,
            c.lhs,
            c.rhs,
            c.margin,
            if c.pass { "ok" } else { "FAIL" }
        ));
    }
    out
}

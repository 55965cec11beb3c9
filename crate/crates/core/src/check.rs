//! Pass/fail records shared by the resolvent checks and the verification report.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

/// One quantitative check. `margin` is relative: positive means the
/// inequality holds with room to spare, and the check passes when
/// `margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRecord {
    fn compared(name: &str, anchor: &str, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        let status = if margin.is_finite() && margin >= -tolerance { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin: Some(margin),
            tolerance: Some(tolerance),
            status,
            note: None,
        }
    }

    /// `lhs <= rhs`, margin `(rhs - lhs) / |rhs|`.
    pub fn upper(name: &str, anchor: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::compared(name, anchor, lhs, rhs, (rhs - lhs) / rhs.abs().max(f64::MIN_POSITIVE), tolerance)
    }

    /// `lhs >= rhs`, margin `(lhs - rhs) / |rhs|`.
    pub fn lower(name: &str, anchor: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::compared(name, anchor, lhs, rhs, (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE), tolerance)
    }

    /// `lhs <= tolerance` for an error quantity; `rhs` is 0 and the margin absolute.
    pub fn small(name: &str, anchor: &str, value: f64, tolerance: f64) -> Self {
        let mut rec = Self::compared(name, anchor, value, 0.0, tolerance - value, 0.0);
        rec.tolerance = Some(tolerance);
        rec
    }

    /// `lhs >= rhs - tolerance * scale`, margin `(lhs - rhs) / scale`.
    pub fn scaled_lower(name: &str, anchor: &str, lhs: f64, rhs: f64, scale: f64, tolerance: f64) -> Self {
        Self::compared(name, anchor, lhs, rhs, (lhs - rhs) / scale.max(f64::MIN_POSITIVE), tolerance)
    }

    /// A boolean outcome with an optional reported value.
    pub fn flag(name: &str, anchor: &str, value: Option<f64>, ok: bool) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs: value,
            rhs: None,
            margin: None,
            tolerance: None,
            status: if ok { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    pub fn not_applicable(name: &str, anchor: &str, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs: None,
            rhs: None,
            margin: None,
            tolerance: None,
            status: Status::NotApplicable,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Anchor ids used in check records. Each one is described in `docs/anchors.md`.
pub mod anchor {
    pub const PLUMBING: &str = "plumbing";
    pub const ASSUMPTIONS: &str = "structural-assumptions";
    pub const CONSTANTS: &str = "spectral-constants";
    pub const DISSIPATIVITY_CONSTANT: &str = "dissipativity-constant";
    pub const KERNEL_MOMENTS: &str = "kernel-moments";
    pub const KERNEL_MOMENT_BOUND: &str = "kernel-moment-bound";
    pub const SEMIGROUP_LAW: &str = "semigroup-law";
    pub const SEMIGROUP_CONTINUITY: &str = "strong-continuity";
    pub const GENERATOR_CORE: &str = "generator-core";
    pub const RESOLVENT_INTEGRAL: &str = "resolvent-laplace-integral";
    pub const RESOLVENT_BOUND_SEMIGROUP: &str = "resolvent-bound-semigroup";
    pub const RESOLVENT_BOUND_DISSIPATIVE: &str = "resolvent-bound-dissipative";
    pub const GRADIENT_BOUND: &str = "resolvent-gradient-bound";
    pub const MAXIMAL_DOMAIN: &str = "maximal-domain-regularity";
    pub const LP_DISSIPATIVITY: &str = "lp-dissipativity";
    pub const IBP_INEQUALITY: &str = "weighted-ibp-inequality";

    pub const ALL: &[&str] = &[
        PLUMBING,
        ASSUMPTIONS,
        CONSTANTS,
        DISSIPATIVITY_CONSTANT,
        KERNEL_MOMENTS,
        KERNEL_MOMENT_BOUND,
        SEMIGROUP_LAW,
        SEMIGROUP_CONTINUITY,
        GENERATOR_CORE,
        RESOLVENT_INTEGRAL,
        RESOLVENT_BOUND_SEMIGROUP,
        RESOLVENT_BOUND_DISSIPATIVE,
        GRADIENT_BOUND,
        MAXIMAL_DOMAIN,
        LP_DISSIPATIVITY,
        IBP_INEQUALITY,
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_status() {
        let r = CheckRecord::upper("x", anchor::PLUMBING, 0.9, 1.0, 0.0);
        assert_eq!(r.status, Status::Pass);
        assert!((r.margin.unwrap() - 0.1).abs() < 1e-15);
        let r = CheckRecord::upper("x", anchor::PLUMBING, 1.0005, 1.0, 1e-3);
        assert_eq!(r.status, Status::Pass);
        let r = CheckRecord::lower("x", anchor::PLUMBING, 0.5, 1.0, 1e-3);
        assert_eq!(r.status, Status::Fail);
        let r = CheckRecord::small("x", anchor::PLUMBING, 2e-4, 1e-3);
        assert_eq!(r.status, Status::Pass);
        let r = CheckRecord::upper("x", anchor::PLUMBING, f64::NAN, 1.0, 1e-3);
        assert_eq!(r.status, Status::Fail);
    }
}

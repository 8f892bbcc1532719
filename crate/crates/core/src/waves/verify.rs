use serde::{Deserialize, Serialize};

use super::{WaveProfile, DEFAULT_SLACK};
use crate::barrier::{bounds_scaled, Weights};
use crate::model::ScaledParams;
use crate::tangent::{solve_tangent, sum_bounds};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The bound does not apply (outside the tangent window, or the profile
    /// is not a wave between the right end states).
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub quantity: String,
    /// `"lower"` or `"upper"`.
    pub side: String,
    /// Absent when the bound does not exist for these parameters.
    pub bound: Option<f64>,
    /// Min (lower) or max (upper) of the quantity along the profile.
    pub observed: f64,
    /// Signed distance to the bound; negative means violated.
    pub margin: Option<f64>,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub alpha: f64,
    pub beta: f64,
    pub min_q: f64,
    pub max_q: f64,
    pub slack: f64,
    pub endpoint_errors: (f64, f64),
    pub boundary_ok: bool,
    pub checks: Vec<BoundCheck>,
    /// True when the end states are right and no check failed.
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

fn extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

struct Builder {
    boundary_ok: bool,
    slack: f64,
    checks: Vec<BoundCheck>,
}

impl Builder {
    fn push(&mut self, name: &str, quantity: &str, lower: bool, bound: f64, observed: f64, note: Option<String>) {
        let margin = if lower { observed - bound } else { bound - observed };
        let status = if !self.boundary_ok {
            CheckStatus::NotApplicable
        } else if margin >= -self.slack {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        let note = note.or_else(|| (!self.boundary_ok).then(|| "profile does not connect (1, 0) to (0, 1)".into()));
        self.checks.push(BoundCheck {
            name: name.into(),
            quantity: quantity.into(),
            side: if lower { "lower" } else { "upper" }.into(),
            bound: Some(bound),
            observed,
            margin: Some(margin),
            status,
            note,
        });
    }

    fn not_applicable(&mut self, name: &str, quantity: &str, lower: bool, observed: f64, note: String) {
        self.checks.push(BoundCheck {
            name: name.into(),
            quantity: quantity.into(),
            side: if lower { "lower" } else { "upper" }.into(),
            bound: None,
            observed,
            margin: None,
            status: CheckStatus::NotApplicable,
            note: Some(note),
        });
    }
}

/// [`bound_verify_with_slack`] with [`DEFAULT_SLACK`].
pub fn bound_verify(profile: &WaveProfile, p: &ScaledParams, w: &Weights) -> Result<VerificationReport> {
    bound_verify_with_slack(profile, p, w, DEFAULT_SLACK)
}

/// Evaluates `q = alpha u + d beta v` along the profile and compares it with
/// every closed-form bound that applies to `p`. Violations are report
/// entries, not errors; errors only come from parameters outside the
/// bistable regime.
pub fn bound_verify_with_slack(
    profile: &WaveProfile,
    p: &ScaledParams,
    w: &Weights,
    slack: f64,
) -> Result<VerificationReport> {
    let bounds = bounds_scaled(p, w)?;
    let d = p.d();
    let (min_q, max_q) = extremes(profile.u.iter().zip(&profile.v).map(|(&u, &v)| w.q(d, u, v)));
    let endpoint_errors = profile.endpoint_errors();
    let boundary_ok = endpoint_errors.0 <= profile.meta.eps_bc && endpoint_errors.1 <= profile.meta.eps_bc;

    let mut b = Builder {
        boundary_ok,
        slack,
        checks: Vec::new(),
    };
    let q = bounds.quantity.as_str();
    b.push("barrier_lower", q, true, bounds.lower, min_q, None);
    b.push("barrier_upper", q, false, bounds.upper, max_q, None);
    match solve_tangent(p, w) {
        Ok(sol) => b.push("tangent_lower", q, true, sol.lower_bound(), min_q, None),
        Err(e) => b.not_applicable("tangent_lower", q, true, min_q, e.to_string()),
    }
    if d == 1.0 && p.k() == 1.0 {
        let sum = sum_bounds(p.a1(), p.a2())?;
        let (lo, hi) = extremes(profile.u.iter().zip(&profile.v).map(|(u, v)| u + v));
        b.push("sum_lower", &sum.quantity, true, sum.lower, lo, None);
        b.push("sum_upper", &sum.quantity, false, sum.upper, hi, None);
    }

    let passed = boundary_ok && b.checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerificationReport {
        alpha: w.alpha,
        beta: w.beta,
        min_q,
        max_q,
        slack,
        endpoint_errors,
        boundary_ok,
        checks: b.checks,
        passed,
    })
}

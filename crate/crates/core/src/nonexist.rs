//! Nonexistence criterion for traveling waves of three competing species.
//!
//! With `phi1 = sigma1 c33 - sigma3 c13` and `phi2 = sigma2 c33 - sigma3 c23`,
//! no positive wave connecting the boundary states exists when
//!
//! - H1: `phi1 > 0` and `phi2 > 0`,
//! - H2: `c21 phi1 > c11 phi2` and `c12 phi2 > c22 phi1`,
//! - H3: `min[c31 phi2 / (c21 d2), c32 phi1 / (c12 d1)] min[d1^2, d2^2] >= sigma3 c33`.
//!
//! Failing any of them says nothing about existence, hence `Inconclusive`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barrier::{bounds_unscaled, Weights};
use crate::model::{ThreeSpeciesParams, UnscaledParams};
use crate::{Error, Result};

/// What a certified verdict covers.
pub const SCOPE: &str = "nonexistence of positive waves with boundary states \
    (sigma1/c11, 0, 0) at -inf and (0, sigma2/c22, 0) at +inf only";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NonexistenceCertified,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NonexistenceCertified => "NONEXISTENCE_CERTIFIED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeSpeciesVerdict {
    pub phi1: f64,
    pub phi2: f64,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h3_lhs: f64,
    pub h3_rhs: f64,
    pub margins: Margins,
    pub verdict: Verdict,
}

pub const CSV_HEADER: [&str; 12] = [
    "value", "phi1", "phi2", "h1", "h2", "h3", "h3_lhs", "h3_rhs", "margin_h1", "margin_h2",
    "margin_h3", "verdict",
];

impl ThreeSpeciesVerdict {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::NonexistenceCertified
    }

    /// One sweep row matching [`CSV_HEADER`].
    pub fn csv_record(&self, value: f64) -> Vec<String> {
        vec![
            value.to_string(),
            self.phi1.to_string(),
            self.phi2.to_string(),
            self.h1.to_string(),
            self.h2.to_string(),
            self.h3.to_string(),
            self.h3_lhs.to_string(),
            self.h3_rhs.to_string(),
            self.margins.h1.to_string(),
            self.margins.h2.to_string(),
            self.margins.h3.to_string(),
            self.verdict.as_str().to_string(),
        ]
    }
}

pub fn check(p: &ThreeSpeciesParams) -> Result<ThreeSpeciesVerdict> {
    p.validate()?;
    let phi1 = p.sigma1 * p.c33 - p.sigma3 * p.c13;
    let phi2 = p.sigma2 * p.c33 - p.sigma3 * p.c23;
    let h1 = phi1 > 0.0 && phi2 > 0.0;
    let (left, right) = (p.c21 * phi1 - p.c11 * phi2, p.c12 * phi2 - p.c22 * phi1);
    let h2 = left > 0.0 && right > 0.0;
    let h3_lhs = (p.c31 * phi2 / (p.c21 * p.d2)).min(p.c32 * phi1 / (p.c12 * p.d1))
        * (p.d1 * p.d1).min(p.d2 * p.d2);
    let h3_rhs = p.sigma3 * p.c33;
    let h3 = h3_lhs >= h3_rhs;
    Ok(ThreeSpeciesVerdict {
        phi1,
        phi2,
        h1,
        h2,
        h3,
        h3_lhs,
        h3_rhs,
        margins: Margins {
            h1: phi1.min(phi2),
            h2: left.min(right),
            h3: h3_lhs - h3_rhs,
        },
        verdict: if h1 && h2 && h3 {
            Verdict::NonexistenceCertified
        } else {
            Verdict::Inconclusive
        },
    })
}

/// Growth rates of the first two species once the third is bounded by
/// `w_max`: `(sigma1 - c13 w_max, sigma2 - c23 w_max)`. At
/// `w_max = sigma3 / c33` these are `phi1 / c33` and `phi2 / c33`.
pub fn reduced_system_margin(p: &ThreeSpeciesParams, w_max: f64) -> Result<(f64, f64)> {
    p.validate()?;
    if !(w_max >= 0.0 && w_max <= p.sigma3 / p.c33) {
        return Err(Error::InvalidParameter { name: "w_max", value: w_max });
    }
    Ok((p.sigma1 - p.c13 * w_max, p.sigma2 - p.c23 * w_max))
}

/// The two-species system left after replacing `w` by its supremum.
pub fn reduced_system(p: &ThreeSpeciesParams) -> Result<UnscaledParams> {
    let (sigma1, sigma2) = reduced_system_margin(p, p.sigma3 / p.c33)?;
    let reduced = UnscaledParams {
        d1: p.d1,
        d2: p.d2,
        sigma1,
        sigma2,
        c11: p.c11,
        c12: p.c12,
        c21: p.c21,
        c22: p.c22,
    };
    reduced.validate()?;
    Ok(reduced)
}

/// Lower bound on `d1 c31 u + d2 c32 v` for the reduced system, from the
/// unscaled barrier bound with weights `(c31, c32)`.
///
/// Under H1 and H2 the reduced system is bistable and this equals
/// `h3_lhs / c33`, so H3 reads `reduced_lower_bound >= sigma3`. The barrier
/// bound controls the diffusion-weighted combination; the `c31 u + c32 v`
/// that enters the equation for `w` is bounded below by it only up to the
/// factor `max(d1, d2)`.
pub fn reduced_lower_bound(p: &ThreeSpeciesParams) -> Result<f64> {
    let reduced = reduced_system(p)?;
    let w = Weights::new(p.c31, p.c32)?;
    Ok(bounds_unscaled(&reduced, &w)?.lower)
}

/// Verdicts for `base` with field `axis` replaced by each of `values`, in
/// order.
pub fn sweep(base: &ThreeSpeciesParams, axis: &str, values: &[f64]) -> Result<Vec<ThreeSpeciesVerdict>> {
    if base.get(axis).is_none() {
        return Err(Error::UnknownAxis(axis.to_string()));
    }
    values
        .par_iter()
        .map(|&value| {
            let mut p = *base;
            *p.field_mut(axis).expect("axis checked above") = value;
            check(&p)
        })
        .collect()
}

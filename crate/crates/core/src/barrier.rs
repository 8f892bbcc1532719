//! N-barrier constructions and the closed-form bounds on `q = alpha u + d beta v`.
//!
//! An N-barrier is a nested triple of lines in the `(u, v)` plane: two level
//! lines of `q` (levels `lambda1`, `lambda2`) and one level line of
//! `p = alpha u + beta v` (level `eta`). For the lower construction the
//! triangles cut off by these lines satisfy `Q(lambda1) ⊆ P(eta) ⊆ Q(lambda2)`
//! and `Q(lambda2)` sits below both nullclines; for the upper construction the
//! nesting is reversed and the `lambda2` line sits above both nullclines.
//!
//! The level tables are generic over the scalar type so that they can be
//! evaluated in exact rational arithmetic as well as in `f64`.

use std::ops::{Add, Div, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::model::{ScaledParams, UnscaledParams};
use crate::{Error, Result};

/// Positive weights on `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
}

impl Weights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, value) in [("alpha", alpha), ("beta", beta)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self { alpha, beta })
    }

    /// `p = alpha u + beta v`.
    pub fn p(&self, u: f64, v: f64) -> f64 {
        self.alpha * u + self.beta * v
    }

    /// `q = alpha u + d beta v`.
    pub fn q(&self, d: f64, u: f64, v: f64) -> f64 {
        self.alpha * u + d * self.beta * v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Lower,
    Upper,
}

/// Which branch of the four-way table fired. The first half of the name is
/// the diffusion split (`d >= 1` or `d < 1`); the second half is the weight
/// comparison (`beta a2 d` vs `alpha a1` for lower barriers, `beta d` vs
/// `alpha` for upper ones).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    DGe1WeightGe,
    DGe1WeightLt,
    DLt1WeightGe,
    DLt1WeightLt,
}

impl CaseTag {
    fn from_split(d_ge_one: bool, weight_ge: bool) -> Self {
        match (d_ge_one, weight_ge) {
            (true, true) => CaseTag::DGe1WeightGe,
            (true, false) => CaseTag::DGe1WeightLt,
            (false, true) => CaseTag::DLt1WeightGe,
            (false, false) => CaseTag::DLt1WeightLt,
        }
    }
}

/// Minimal field interface shared by `f64` and exact rationals.
pub trait Scalar:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn one() -> Self;
}

impl<T> Scalar for T
where
    T: Copy + PartialOrd + num_traits::Num,
{
    fn one() -> Self {
        T::one()
    }
}

/// `(case, lambda1, lambda2, eta)` of the lower N-barrier.
pub fn lower_levels<T: Scalar>(a1: T, a2: T, d: T, alpha: T, beta: T) -> (CaseTag, T, T, T) {
    let one = T::one();
    let d_ge_one = d >= one;
    let weight_ge = beta * a2 * d >= alpha * a1;
    let levels = match (d_ge_one, weight_ge) {
        (true, true) => (alpha / (a2 * d), alpha / a2, alpha / (a2 * d)),
        (true, false) => (beta / a1, beta * d / a1, beta / a1),
        (false, true) => (alpha * d / a2, alpha / a2, alpha / a2),
        (false, false) => (beta * d * d / a1, beta * d / a1, beta * d / a1),
    };
    (CaseTag::from_split(d_ge_one, weight_ge), levels.0, levels.1, levels.2)
}

/// `(case, lambda1, lambda2, eta)` of the upper N-barrier.
pub fn upper_levels<T: Scalar>(d: T, alpha: T, beta: T) -> (CaseTag, T, T, T) {
    let one = T::one();
    let d_ge_one = d >= one;
    let weight_ge = beta * d >= alpha;
    let levels = match (d_ge_one, weight_ge) {
        (true, true) => (beta * d * d, beta * d, beta * d),
        (true, false) => (alpha * d, alpha, alpha),
        (false, true) => (beta, beta * d, beta),
        (false, false) => (alpha / d, alpha, alpha / d),
    };
    (CaseTag::from_split(d_ge_one, weight_ge), levels.0, levels.1, levels.2)
}

/// One N-barrier: two `q`-lines and one `p`-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub direction: Direction,
    pub case_tag: CaseTag,
    pub lambda1: f64,
    pub lambda2: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Diffusion ratio defining the `q`-lines.
    pub d: f64,
}

/// A straight segment between two points of the closed positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

impl Segment {
    /// The part of `a u + b v = level` inside the positive quadrant.
    pub fn level_line(a: f64, b: f64, level: f64) -> Self {
        Segment {
            from: (level / a, 0.0),
            to: (0.0, level / b),
        }
    }
}

impl Barrier {
    pub fn weights(&self) -> Weights {
        Weights {
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    /// Segments of the inner `q`-line, the outer `q`-line and the `p`-line.
    pub fn segments(&self) -> [Segment; 3] {
        let qb = self.d * self.beta;
        [
            Segment::level_line(self.alpha, qb, self.lambda1),
            Segment::level_line(self.alpha, qb, self.lambda2),
            Segment::level_line(self.alpha, self.beta, self.eta),
        ]
    }

    /// The bound this barrier certifies on `q`.
    pub fn bound(&self) -> f64 {
        self.lambda1
    }
}

pub fn lower_barrier_scaled(p: &ScaledParams, w: &Weights) -> Result<Barrier> {
    p.require_bistable()?;
    let (case_tag, lambda1, lambda2, eta) =
        lower_levels(p.a1(), p.a2(), p.d(), w.alpha, w.beta);
    Ok(Barrier {
        direction: Direction::Lower,
        case_tag,
        lambda1,
        lambda2,
        eta,
        alpha: w.alpha,
        beta: w.beta,
        d: p.d(),
    })
}

pub fn upper_barrier_scaled(p: &ScaledParams, w: &Weights) -> Result<Barrier> {
    p.require_bistable()?;
    let (case_tag, lambda1, lambda2, eta) = upper_levels(p.d(), w.alpha, w.beta);
    Ok(Barrier {
        direction: Direction::Upper,
        case_tag,
        lambda1,
        lambda2,
        eta,
        alpha: w.alpha,
        beta: w.beta,
        d: p.d(),
    })
}

/// Lower and upper bound on some linear combination of the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub quantity: String,
}

/// Bounds on `q = alpha u + d beta v` for the scaled system:
/// `min[alpha/(a2 d), beta/a1] min[1, d^2] <= q <= max[alpha/d, beta] max[1, d^2]`.
///
/// Only `a1`, `a2`, `d` and the weights enter; `k` and the wave speed do not.
pub fn bounds_scaled(p: &ScaledParams, w: &Weights) -> Result<BoundPair> {
    p.require_bistable()?;
    let (a1, a2, d) = (p.a1(), p.a2(), p.d());
    let lower = (w.alpha / (a2 * d)).min(w.beta / a1) * (d * d).min(1.0);
    let upper = (w.alpha / d).max(w.beta) * (d * d).max(1.0);
    Ok(BoundPair {
        lower,
        upper,
        quantity: "alpha*u + d*beta*v".into(),
    })
}

/// Intercepts of the two regions on which the nonlinearities have a sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralNullclineBox {
    pub u_bar: f64,
    pub v_bar: f64,
    pub u_low: f64,
    pub v_low: f64,
}

impl GeneralNullclineBox {
    pub fn new(u_bar: f64, v_bar: f64, u_low: f64, v_low: f64) -> Result<Self> {
        if !(u_low > 0.0 && u_bar > u_low && u_bar.is_finite()) {
            return Err(Error::InvalidParameter { name: "u_low/u_bar", value: u_low });
        }
        if !(v_low > 0.0 && v_bar > v_low && v_bar.is_finite()) {
            return Err(Error::InvalidParameter { name: "v_low/v_bar", value: v_low });
        }
        Ok(Self {
            u_bar,
            v_bar,
            u_low,
            v_low,
        })
    }
}

/// Result of the generalized bound together with the lower construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralBounds {
    pub bounds: BoundPair,
    pub lambda1: f64,
    pub lambda2: f64,
    pub eta: f64,
    pub chi: f64,
}

/// Bounds on `a u + b v` for a general system with sign-definite
/// nonlinearities. The lower bound collapses to zero when either end state
/// is the origin.
pub fn bounds_general(
    d1: f64,
    d2: f64,
    bx: &GeneralNullclineBox,
    a: f64,
    b: f64,
    e_minus_zero: bool,
    e_plus_zero: bool,
) -> Result<GeneralBounds> {
    for (name, value) in [("d1", d1), ("d2", d2), ("a", a), ("b", b)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter { name, value });
        }
    }
    let (dmin, dmax) = (d1.min(d2), d1.max(d2));
    let chi = if e_minus_zero || e_plus_zero { 0.0 } else { 1.0 };
    let lambda2 = (a * bx.u_low).min(b * bx.v_low);
    let eta = (1.0 / d1).min(1.0 / d2) * lambda2;
    let lambda1 = (d1 / d2).min(d2 / d1) * lambda2;
    let upper = (a * bx.u_bar).max(b * bx.v_bar) * dmax / dmin;
    let lower = lambda2 * dmin / dmax * chi;
    Ok(GeneralBounds {
        bounds: BoundPair {
            lower,
            upper,
            quantity: "a*u + b*v".into(),
        },
        lambda1,
        lambda2,
        eta,
        chi,
    })
}

/// Bounds on `q = d1 alpha u + d2 beta v` for the raw system.
pub fn bounds_unscaled(p: &UnscaledParams, w: &Weights) -> Result<BoundPair> {
    p.validate()?;
    if !p.bis() {
        return Err(Error::NotBistable(
            "need sigma1/c11 > sigma2/c21 and sigma2/c22 > sigma1/c12".into(),
        ));
    }
    let (d1sq, d2sq) = (p.d1 * p.d1, p.d2 * p.d2);
    let lower = (w.alpha * p.sigma2 / (p.c21 * p.d2)).min(w.beta * p.sigma1 / (p.c12 * p.d1))
        * d1sq.min(d2sq);
    let upper = (w.alpha * p.sigma1 / (p.c11 * p.d2)).max(w.beta * p.sigma2 / (p.c22 * p.d1))
        * d1sq.max(d2sq);
    Ok(BoundPair {
        lower,
        upper,
        quantity: "d1*alpha*u + d2*beta*v".into(),
    })
}

/// Discriminant `(alpha a1 + beta k a2)^2 - 4 alpha beta k` of the conic
/// `F(u, v) = 0`; positive means the conic is a hyperbola.
pub fn hyperbola_check(p: &ScaledParams, w: &Weights) -> f64 {
    let s = w.alpha * p.a1() + w.beta * p.k() * p.a2();
    s * s - 4.0 * w.alpha * w.beta * p.k()
}

/// `F(u, v) = alpha u (1 - u - a1 v) + beta k v (1 - a2 u - v)`.
pub fn f_eval(p: &ScaledParams, w: &Weights, u: f64, v: f64) -> f64 {
    w.alpha * u * (1.0 - u - p.a1() * v) + w.beta * p.k() * v * (1.0 - p.a2() * u - v)
}

/// Gradient `(F_u, F_v)`.
pub fn f_grad(p: &ScaledParams, w: &Weights, u: f64, v: f64) -> (f64, f64) {
    let (a1, a2, k) = (p.a1(), p.a2(), p.k());
    (
        w.alpha * (1.0 - 2.0 * u - a1 * v) - w.beta * k * a2 * v,
        -w.alpha * a1 * u + w.beta * k * (1.0 - a2 * u - 2.0 * v),
    )
}

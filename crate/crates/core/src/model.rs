//! Parameter sets, scaling between the raw and scaled systems, equilibria and
//! regime classification.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// The scaled two-species system
/// `u_t = u_yy + u(1 - u - a1 v)`, `v_t = d v_yy + k v(1 - a2 u - v)`.
///
/// `theta` is an optional wave speed carried along with the parameters; the
/// bounds never depend on it, the wave solver uses it as an initial guess.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScaledRaw")]
pub struct ScaledParams {
    a1: f64,
    a2: f64,
    d: f64,
    k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaledRaw {
    a1: f64,
    a2: f64,
    d: f64,
    k: f64,
    #[serde(default)]
    theta: Option<f64>,
}

impl TryFrom<ScaledRaw> for ScaledParams {
    type Error = Error;

    fn try_from(raw: ScaledRaw) -> Result<Self> {
        let p = ScaledParams::new(raw.a1, raw.a2, raw.d, raw.k)?;
        Ok(match raw.theta {
            Some(theta) => p.with_theta(theta)?,
            None => p,
        })
    }
}

impl ScaledParams {
    pub fn new(a1: f64, a2: f64, d: f64, k: f64) -> Result<Self> {
        Ok(Self {
            a1: positive("a1", a1)?,
            a2: positive("a2", a2)?,
            d: positive("d", d)?,
            k: positive("k", k)?,
            theta: None,
        })
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter { name: "theta", value: theta });
        }
        self.theta = Some(theta);
        Ok(self)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// `a1 > 1 && a2 > 1`.
    pub fn is_bistable(&self) -> bool {
        self.a1 > 1.0 && self.a2 > 1.0
    }

    pub(crate) fn require_bistable(&self) -> Result<()> {
        if self.is_bistable() {
            Ok(())
        } else {
            Err(Error::NotBistable(format!(
                "need a1 > 1 and a2 > 1, got a1 = {}, a2 = {}",
                self.a1, self.a2
            )))
        }
    }

    /// Reaction terms `(u(1 - u - a1 v), k v(1 - a2 u - v))`.
    pub fn reaction(&self, u: f64, v: f64) -> (f64, f64) {
        (
            u * (1.0 - u - self.a1 * v),
            self.k * v * (1.0 - self.a2 * u - v),
        )
    }
}

/// The raw two-species system with diffusion `d_i`, growth `sigma_i` and
/// competition `c_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnscaledRaw")]
pub struct UnscaledParams {
    pub d1: f64,
    pub d2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub c11: f64,
    pub c12: f64,
    pub c21: f64,
    pub c22: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnscaledRaw {
    d1: f64,
    d2: f64,
    sigma1: f64,
    sigma2: f64,
    c11: f64,
    c12: f64,
    c21: f64,
    c22: f64,
}

impl TryFrom<UnscaledRaw> for UnscaledParams {
    type Error = Error;

    fn try_from(r: UnscaledRaw) -> Result<Self> {
        let p = UnscaledParams {
            d1: r.d1,
            d2: r.d2,
            sigma1: r.sigma1,
            sigma2: r.sigma2,
            c11: r.c11,
            c12: r.c12,
            c21: r.c21,
            c22: r.c22,
        };
        p.validate()?;
        Ok(p)
    }
}

impl UnscaledParams {
    pub fn validate(&self) -> Result<()> {
        positive("d1", self.d1)?;
        positive("d2", self.d2)?;
        positive("sigma1", self.sigma1)?;
        positive("sigma2", self.sigma2)?;
        positive("c11", self.c11)?;
        positive("c12", self.c12)?;
        positive("c21", self.c21)?;
        positive("c22", self.c22)?;
        Ok(())
    }

    /// Strong-competition condition: `sigma1/c11 > sigma2/c21` and
    /// `sigma2/c22 > sigma1/c12`.
    pub fn bis(&self) -> bool {
        self.sigma1 / self.c11 > self.sigma2 / self.c21
            && self.sigma2 / self.c22 > self.sigma1 / self.c12
    }

    pub fn reaction(&self, u: f64, v: f64) -> (f64, f64) {
        (
            u * (self.sigma1 - self.c11 * u - self.c12 * v),
            v * (self.sigma2 - self.c21 * u - self.c22 * v),
        )
    }
}

/// Three competing species; 15 strictly positive constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeSpeciesParams {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c21: f64,
    pub c22: f64,
    pub c23: f64,
    pub c31: f64,
    pub c32: f64,
    pub c33: f64,
}

impl ThreeSpeciesParams {
    pub const FIELDS: [&'static str; 15] = [
        "d1", "d2", "d3", "sigma1", "sigma2", "sigma3", "c11", "c12", "c13", "c21", "c22", "c23",
        "c31", "c32", "c33",
    ];

    pub fn validate(&self) -> Result<()> {
        for name in Self::FIELDS {
            let value = self.get(name).expect("listed field");
            positive(name, value)?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = *self;
        copy.field_mut(name).map(|f| *f)
    }

    pub fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "d1" => &mut self.d1,
            "d2" => &mut self.d2,
            "d3" => &mut self.d3,
            "sigma1" => &mut self.sigma1,
            "sigma2" => &mut self.sigma2,
            "sigma3" => &mut self.sigma3,
            "c11" => &mut self.c11,
            "c12" => &mut self.c12,
            "c13" => &mut self.c13,
            "c21" => &mut self.c21,
            "c22" => &mut self.c22,
            "c23" => &mut self.c23,
            "c31" => &mut self.c31,
            "c32" => &mut self.c32,
            "c33" => &mut self.c33,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegimeCase {
    UWins,
    VWins,
    Bistable,
    Coexist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibria {
    pub e1: (f64, f64),
    pub e2: (f64, f64),
    pub e3: (f64, f64),
    /// Interior equilibrium, present only inside the open positive quadrant.
    pub e4: Option<(f64, f64)>,
}

pub fn classify(p: &ScaledParams) -> Result<RegimeCase> {
    let (a1, a2) = (p.a1, p.a2);
    if a1 == 1.0 || a2 == 1.0 {
        return Err(Error::AmbiguousRegime { a1, a2 });
    }
    Ok(match (a1 > 1.0, a2 > 1.0) {
        (false, true) => RegimeCase::UWins,
        (true, false) => RegimeCase::VWins,
        (true, true) => RegimeCase::Bistable,
        (false, false) => RegimeCase::Coexist,
    })
}

pub fn equilibria(p: &ScaledParams) -> Equilibria {
    let det = 1.0 - p.a1 * p.a2;
    let e4 = if det != 0.0 {
        let u = (1.0 - p.a1) / det;
        let v = (1.0 - p.a2) / det;
        (u > 0.0 && v > 0.0).then_some((u, v))
    } else {
        None
    };
    Equilibria {
        e1: (0.0, 0.0),
        e2: (1.0, 0.0),
        e3: (0.0, 1.0),
        e4,
    }
}

/// Affine change of variables between the raw and the scaled system:
/// `U = c11 u / sigma1`, `V = c22 v / sigma2`, `X = x sqrt(sigma1 / d1)`,
/// `T = sigma1 t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleMap {
    pub u_factor: f64,
    pub v_factor: f64,
    pub x_factor: f64,
    pub t_factor: f64,
    /// Raw diffusion rate of `u`; the raw `q` is `d1` times the scaled one.
    pub d1: f64,
}

impl ScaleMap {
    pub fn to_scaled_state(&self, u: f64, v: f64) -> (f64, f64) {
        (u * self.u_factor, v * self.v_factor)
    }

    pub fn to_unscaled_state(&self, u: f64, v: f64) -> (f64, f64) {
        (u / self.u_factor, v / self.v_factor)
    }

    pub fn to_scaled_x(&self, x: f64) -> f64 {
        x * self.x_factor
    }

    pub fn to_unscaled_x(&self, x: f64) -> f64 {
        x / self.x_factor
    }

    pub fn to_scaled_t(&self, t: f64) -> f64 {
        t * self.t_factor
    }

    /// Wave speed in scaled units; `x - theta t` must map to `X - Theta T`.
    pub fn to_scaled_speed(&self, theta: f64) -> f64 {
        theta * self.x_factor / self.t_factor
    }

    pub fn to_unscaled_speed(&self, theta: f64) -> f64 {
        theta * self.t_factor / self.x_factor
    }
}

pub fn scale(p: &UnscaledParams) -> Result<(ScaledParams, ScaleMap)> {
    p.validate()?;
    let scaled = ScaledParams::new(
        p.c12 * p.sigma2 / (p.c22 * p.sigma1),
        p.c21 * p.sigma1 / (p.c11 * p.sigma2),
        p.d2 / p.d1,
        p.sigma2 / p.sigma1,
    )?;
    let map = ScaleMap {
        u_factor: p.c11 / p.sigma1,
        v_factor: p.c22 / p.sigma2,
        x_factor: (p.sigma1 / p.d1).sqrt(),
        t_factor: p.sigma1,
        d1: p.d1,
    };
    Ok((scaled, map))
}

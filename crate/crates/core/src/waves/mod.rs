//! Numerical traveling waves of the scaled two-species system
//!
//! ```text
//!     u'' + theta u' +   u (1 - u - a1 v) = 0
//!   d v'' + theta v' + k v (1 - a2 u - v) = 0
//! ```
//!
//! connecting `(1, 0)` at `-inf` to `(0, 1)` at `+inf`, on a truncated
//! uniform grid with Dirichlet end states. Two independent routes are
//! provided:
//!
//! - [`solve_wave`]: damped Newton on the second-order finite difference
//!   discretisation, with the speed as an extra unknown closed by the phase
//!   condition `u(0) = phase_anchor`;
//! - [`march_oracle`]: method of lines on the parabolic system, with the speed
//!   read off the motion of the `u = 1/2` level set.
//!
//! [`bound_verify`] evaluates every closed-form bound along a profile.

mod banded;
mod march;
mod newton;
mod verify;

use serde::{Deserialize, Serialize};

use crate::model::ScaledParams;
use crate::{Error, Result};

pub use march::{march_from, march_oracle, MarchDiagnostics};
pub use newton::solve_wave;
pub use verify::{bound_verify, bound_verify_with_slack, BoundCheck, CheckStatus, VerificationReport};

/// Slack used by [`bound_verify`] for discretisation error.
pub const DEFAULT_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Half-length `L` of the truncated domain `[-L, L]`.
    #[serde(rename = "L")]
    pub half_length: f64,
    /// Number of grid intervals `N`; must be even so that `x = 0` is a node.
    #[serde(rename = "N")]
    pub intervals: usize,
    /// Max-norm tolerance on the discrete residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Value of `u` pinned at `x = 0`.
    pub phase_anchor: f64,
    /// Parameter sets to step through before the target one.
    pub continuation: Option<Vec<ScaledParams>>,
    /// Tolerance on the distance of the end values from the end states.
    pub eps_bc: f64,
    /// Time step for [`march_oracle`]; defaults to 80% of the stability limit.
    pub dt: Option<f64>,
    /// Seed for a small random perturbation of the Newton initial guess.
    pub jitter_seed: Option<u64>,
    /// Integration horizon for [`march_oracle`].
    pub t_final: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            half_length: 50.0,
            intervals: 2000,
            tol: 1e-10,
            max_iter: 60,
            phase_anchor: 0.5,
            continuation: None,
            eps_bc: 1e-6,
            dt: None,
            jitter_seed: None,
            t_final: 150.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_length.is_finite() && self.half_length > 0.0) {
            return Err(Error::InvalidConfig(format!("L must be positive, got {}", self.half_length)));
        }
        if self.intervals < 64 || self.intervals % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "N must be even and at least 64, got {}",
                self.intervals
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.phase_anchor > 0.0 && self.phase_anchor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "phase anchor must lie in (0, 1), got {}",
                self.phase_anchor
            )));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidConfig(format!("t_final must be positive, got {}", self.t_final)));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_length / self.intervals as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.h();
        (0..=self.intervals)
            .map(|i| -self.half_length + i as f64 * h)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub method: String,
    pub residual: f64,
    pub iterations: usize,
    pub eps_bc: f64,
    pub half_length: f64,
    pub intervals: usize,
    /// Largest negative value removed by clipping to the positive cone.
    pub clipped: f64,
    pub continuation_steps: usize,
}

/// A discretised profile `(u(x), v(x))` with its speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: f64,
    pub meta: ProfileMeta,
}

impl WaveProfile {
    pub fn new(grid: Vec<f64>, u: Vec<f64>, v: Vec<f64>, theta: f64, meta: ProfileMeta) -> Result<Self> {
        let profile = Self { grid, u, v, theta, meta };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.u.len() != n || self.v.len() != n {
            return Err(Error::InvalidProfile(format!(
                "length mismatch: grid {n}, u {}, v {}",
                self.u.len(),
                self.v.len()
            )));
        }
        if n < 65 {
            return Err(Error::InvalidProfile(format!("need at least 64 intervals, got {}", n.saturating_sub(1))));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("grid is not strictly increasing".into()));
        }
        if self.u.iter().chain(&self.v).any(|x| !x.is_finite()) || !self.theta.is_finite() {
            return Err(Error::InvalidProfile("non-finite values".into()));
        }
        Ok(())
    }

    /// Distance of the end values from `(1, 0)` and `(0, 1)`.
    pub fn endpoint_errors(&self) -> (f64, f64) {
        let last = self.grid.len() - 1;
        let left = (self.u[0] - 1.0).abs().max(self.v[0].abs());
        let right = self.u[last].abs().max((self.v[last] - 1.0).abs());
        (left, right)
    }

    /// Cubic (four-point Lagrange) interpolation onto `grid`. Points outside
    /// the profile's range take the nearest end value.
    pub fn resample(&self, grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let u = grid.iter().map(|&x| interpolate_cubic(&self.grid, &self.u, x)).collect();
        let v = grid.iter().map(|&x| interpolate_cubic(&self.grid, &self.v, x)).collect();
        (u, v)
    }

    /// Position where `u` first drops through `level`, scanning left to right.
    pub fn level_crossing(&self, level: f64) -> Option<f64> {
        level_crossing(&self.grid, &self.u, level)
    }

    /// Translated copy with the `u = level` crossing moved to `x = 0`,
    /// sampled on the same grid.
    pub fn recentered(&self, level: f64) -> Option<Self> {
        let shift = self.level_crossing(level)?;
        let shifted: Vec<f64> = self.grid.iter().map(|x| x + shift).collect();
        let (u, v) = self.resample(&shifted);
        Some(Self {
            grid: self.grid.clone(),
            u,
            v,
            theta: self.theta,
            meta: self.meta.clone(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (u, v) = other.resample(&self.grid);
        self.u
            .iter()
            .zip(&u)
            .chain(self.v.iter().zip(&v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_component(&self) -> f64 {
        self.u.iter().chain(&self.v).copied().fold(f64::INFINITY, f64::min)
    }
}

fn bracket(grid: &[f64], x: f64) -> usize {
    // largest i with grid[i] <= x, clamped to [0, n-2]
    let i = grid.partition_point(|&g| g <= x);
    i.saturating_sub(1).min(grid.len() - 2)
}

pub(crate) fn interpolate_cubic(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x <= grid[0] {
        return values[0];
    }
    if x >= grid[n - 1] {
        return values[n - 1];
    }
    let i = bracket(grid, x);
    let start = i.saturating_sub(1).min(n - 4);
    let idx = [start, start + 1, start + 2, start + 3];
    let mut acc = 0.0;
    for &j in &idx {
        let mut basis = 1.0;
        for &m in &idx {
            if m != j {
                basis *= (x - grid[m]) / (grid[j] - grid[m]);
            }
        }
        acc += basis * values[j];
    }
    acc
}

pub(crate) fn level_crossing(grid: &[f64], u: &[f64], level: f64) -> Option<f64> {
    let i = (0..grid.len() - 1).find(|&i| u[i] >= level && u[i + 1] < level)?;
    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    if u[i] == level {
        return Some(lo);
    }
    // the cubic through the neighbouring nodes is monotone enough on one
    // cell for bisection to be safe; fall back to the linear root if not
    let f = |x: f64| interpolate_cubic(grid, u, x) - level;
    if f(lo) < 0.0 || f(hi) >= 0.0 {
        let t = (u[i] - level) / (u[i] - u[i + 1]);
        return Some(grid[i] + t * (grid[i + 1] - grid[i]));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Max-norm of the second-order finite difference residual of
/// `u'' + theta u' + u(1 - u - a1 v) = 0`, `d v'' + theta v' + k v(1 - a2 u - v) = 0`
/// over interior nodes, using the profile's own `theta`.
pub fn residual(profile: &WaveProfile, p: &ScaledParams) -> f64 {
    let x = &profile.grid;
    let (u, v) = (&profile.u, &profile.v);
    let theta = profile.theta;
    let mut worst = 0f64;
    for i in 1..x.len() - 1 {
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        let denom = hm * hp * (hm + hp);
        let second = |f: &[f64]| 2.0 * (hm * f[i + 1] - (hm + hp) * f[i] + hp * f[i - 1]) / denom;
        let first = |f: &[f64]| (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) / denom;
        let (fu, fv) = p.reaction(u[i], v[i]);
        let ru = second(u) + theta * first(u) + fu;
        let rv = p.d() * second(v) + theta * first(v) + fv;
        worst = worst.max(ru.abs()).max(rv.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ProfileMeta {
        ProfileMeta {
            method: "test".into(),
            residual: 0.0,
            iterations: 0,
            eps_bc: 1e-6,
            half_length: 10.0,
            intervals: 128,
            clipped: 0.0,
            continuation_steps: 0,
        }
    }

    fn tanh_profile(n: usize, shift: f64) -> WaveProfile {
        let cfg = SolverConfig {
            half_length: 10.0,
            intervals: n,
            ..SolverConfig::default()
        };
        let grid = cfg.grid();
        let u = grid.iter().map(|x| 0.5 * (1.0 - (x - shift).tanh())).collect();
        let v = grid.iter().map(|x| 0.5 * (1.0 + (x - shift).tanh())).collect();
        WaveProfile::new(grid, u, v, 0.0, meta()).unwrap()
    }

    #[test]
    fn config_validation() {
        SolverConfig::default().validate().unwrap();
        for bad in [
            SolverConfig { intervals: 63, ..Default::default() },
            SolverConfig { intervals: 101, ..Default::default() },
            SolverConfig { half_length: 0.0, ..Default::default() },
            SolverConfig { tol: -1.0, ..Default::default() },
            SolverConfig { phase_anchor: 1.0, ..Default::default() },
            SolverConfig { dt: Some(0.0), ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
        let cfg: SolverConfig = serde_json::from_str(r#"{"L": 20, "N": 400}"#).unwrap();
        assert_eq!((cfg.half_length, cfg.intervals, cfg.tol), (20.0, 400, 1e-10));
        assert!(serde_json::from_str::<SolverConfig>(r#"{"M": 3}"#).is_err());
    }

    #[test]
    fn profile_validation() {
        let p = tanh_profile(128, 0.0);
        let short = WaveProfile::new(p.grid[..60].to_vec(), p.u[..60].to_vec(), p.v[..60].to_vec(), 0.0, meta());
        assert!(short.is_err());
        let mismatched = WaveProfile::new(p.grid.clone(), p.u[1..].to_vec(), p.v.clone(), 0.0, meta());
        assert!(mismatched.is_err());
        let mut grid = p.grid.clone();
        grid.swap(3, 4);
        assert!(WaveProfile::new(grid, p.u.clone(), p.v.clone(), 0.0, meta()).is_err());
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.3 - 2.0).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        for x in [-1.95, -0.1, 0.0, 1.234, 3.6] {
            assert!((interpolate_cubic(&grid, &vals, x) - f(x)).abs() < 1e-12);
        }
        assert_eq!(interpolate_cubic(&grid, &vals, -10.0), vals[0]);
        assert_eq!(interpolate_cubic(&grid, &vals, 10.0), vals[19]);
    }

    #[test]
    fn crossing_and_recentering() {
        let p = tanh_profile(512, 0.731);
        let x = p.level_crossing(0.5).unwrap();
        assert!((x - 0.731).abs() < 1e-6, "{x}");
        let c = p.recentered(0.5).unwrap();
        assert!(c.level_crossing(0.5).unwrap().abs() < 1e-6);
        assert!(c.max_abs_diff(&tanh_profile(512, 0.0)) < 1e-5);
    }

    #[test]
    fn residual_of_perturbed_node_scales_with_inverse_h_squared() {
        // A single-node bump of size eps changes the stencil by 2 eps / h^2.
        let p = ScaledParams::new(2.0, 3.0, 2.0, 1.0).unwrap();
        let cfg = SolverConfig { half_length: 20.0, intervals: 400, ..SolverConfig::default() };
        let base = solve_wave(&p, &cfg).unwrap();
        let h = cfg.h();
        assert!(residual(&base, &p) <= cfg.tol);
        let mut bumped = base.clone();
        bumped.u[150] += 1e-3;
        let r1 = residual(&bumped, &p);
        let predicted = 2.0 * 1e-3 / (h * h);
        assert!((r1 / predicted - 1.0).abs() < 0.05, "{r1} vs {predicted}");
    }
}

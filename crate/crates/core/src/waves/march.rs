//! Method-of-lines oracle: integrate the parabolic system until the front
//! moves rigidly and read the speed off the `u = 1/2` level set.

use serde::{Deserialize, Serialize};

use super::{interpolate_cubic, level_crossing, ProfileMeta, SolverConfig, WaveProfile};
use crate::model::ScaledParams;
use crate::{Error, Result};

/// Real-axis extent of the RK4 stability region.
const RK4_STABILITY: f64 = 2.785;
const MAX_HALVINGS: usize = 10;
/// Relative speed drift allowed between the two halves of the fitting window.
const MAX_DRIFT: f64 = 1e-3;
/// Roughly how often (in time units) the front position is sampled.
const SAMPLE_EVERY: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarchDiagnostics {
    pub speed: f64,
    pub drift: f64,
    pub dt: f64,
    pub dt_limit: f64,
    pub steps: usize,
    /// Total number of grid nodes the window was shifted by.
    pub shift_nodes: i64,
}

fn dt_limit(p: &ScaledParams, h: f64) -> f64 {
    let diffusion = 4.0 * p.d().max(1.0) / (h * h);
    let reaction = (3.0 + 2.0 * p.a1()).max(p.k() * (3.0 + 2.0 * p.a2()));
    RK4_STABILITY / (diffusion + reaction)
}

fn choose_dt(p: &ScaledParams, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let limit = dt_limit(p, cfg.h());
    let Some(mut dt) = cfg.dt else {
        return Ok((0.8 * limit, limit));
    };
    for _ in 0..MAX_HALVINGS {
        if dt <= limit {
            return Ok((dt, limit));
        }
        dt *= 0.5;
    }
    if dt <= limit {
        Ok((dt, limit))
    } else {
        Err(Error::CflViolation { dt: cfg.dt.unwrap(), limit })
    }
}

fn rhs(p: &ScaledParams, h2: f64, u: &[f64], v: &[f64], du: &mut [f64], dv: &mut [f64]) {
    let n = u.len();
    du[0] = 0.0;
    dv[0] = 0.0;
    du[n - 1] = 0.0;
    dv[n - 1] = 0.0;
    for i in 1..n - 1 {
        let (fu, fv) = p.reaction(u[i], v[i]);
        du[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2 + fu;
        dv[i] = p.d() * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2 + fv;
    }
}

struct Rk4 {
    k: [(Vec<f64>, Vec<f64>); 4],
    su: Vec<f64>,
    sv: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        let z = || (vec![0.0; n], vec![0.0; n]);
        Self {
            k: [z(), z(), z(), z()],
            su: vec![0.0; n],
            sv: vec![0.0; n],
        }
    }

    fn step(&mut self, p: &ScaledParams, h2: f64, dt: f64, u: &mut [f64], v: &mut [f64]) {
        let n = u.len();
        let weights = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                self.su.copy_from_slice(u);
                self.sv.copy_from_slice(v);
            } else {
                let (pu, pv) = &self.k[s - 1];
                for i in 0..n {
                    self.su[i] = u[i] + weights[s] * dt * pu[i];
                    self.sv[i] = v[i] + weights[s] * dt * pv[i];
                }
            }
            let (ku, kv) = &mut self.k[s];
            rhs(p, h2, &self.su, &self.sv, ku, kv);
        }
        for i in 0..n {
            u[i] += dt / 6.0 * (self.k[0].0[i] + 2.0 * self.k[1].0[i] + 2.0 * self.k[2].0[i] + self.k[3].0[i]);
            v[i] += dt / 6.0 * (self.k[0].1[i] + 2.0 * self.k[1].1[i] + 2.0 * self.k[2].1[i] + self.k[3].1[i]);
        }
    }
}

/// Least-squares slope of `y` against `t`.
fn slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let num: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let den: f64 = t.iter().map(|a| (a - tm) * (a - tm)).sum();
    num / den
}

fn shift_window(values: &mut Vec<f64>, m: i64, left: f64, right: f64) {
    let n = values.len() as i64;
    let old = std::mem::take(values);
    *values = (0..n)
        .map(|i| {
            let j = i + m;
            if j < 0 {
                left
            } else if j >= n {
                right
            } else {
                old[j as usize]
            }
        })
        .collect();
}

/// Integrates from a tanh step on the configured grid.
pub fn march_oracle(p: &ScaledParams, cfg: &SolverConfig) -> Result<(WaveProfile, MarchDiagnostics)> {
    cfg.validate()?;
    let grid = cfg.grid();
    let u: Vec<f64> = grid.iter().map(|x| 0.5 * (1.0 - (x / 2.0).tanh())).collect();
    let v: Vec<f64> = u.iter().map(|u| 1.0 - u).collect();
    run(p, cfg, grid, u, v)
}

/// Integrates from `initial`, resampled onto the configured grid.
pub fn march_from(
    p: &ScaledParams,
    cfg: &SolverConfig,
    initial: &WaveProfile,
) -> Result<(WaveProfile, MarchDiagnostics)> {
    cfg.validate()?;
    initial.validate()?;
    let grid = cfg.grid();
    let (u, v) = initial.resample(&grid);
    run(p, cfg, grid, u, v)
}

fn run(
    p: &ScaledParams,
    cfg: &SolverConfig,
    grid: Vec<f64>,
    mut u: Vec<f64>,
    mut v: Vec<f64>,
) -> Result<(WaveProfile, MarchDiagnostics)> {
    p.require_bistable()?;
    let (dt, limit) = choose_dt(p, cfg)?;
    let h = cfg.h();
    let h2 = h * h;
    let n = grid.len();
    u[0] = 1.0;
    v[0] = 0.0;
    u[n - 1] = 0.0;
    v[n - 1] = 1.0;

    let steps = (cfg.t_final / dt).ceil() as usize;
    let dt = cfg.t_final / steps as f64;
    let sample_stride = ((SAMPLE_EVERY / dt).round() as usize).max(1);
    let lost = || Error::NotTraveling { drift: f64::INFINITY };

    let mut rk = Rk4::new(n);
    let (mut times, mut positions) = (Vec::new(), Vec::new());
    let mut offset_nodes: i64 = 0;
    for step in 1..=steps {
        rk.step(p, h2, dt, &mut u, &mut v);
        if step % sample_stride != 0 && step != steps {
            continue;
        }
        if u.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(lost());
        }
        let x = level_crossing(&grid, &u, 0.5).ok_or_else(lost)?;
        times.push(step as f64 * dt);
        positions.push(x + offset_nodes as f64 * h);
        // keep the front near the middle of the window
        let m = (x / h).round() as i64;
        if m.abs() >= 2 {
            shift_window(&mut u, m, 1.0, 0.0);
            shift_window(&mut v, m, 0.0, 1.0);
            offset_nodes += m;
        }
    }

    let tail = (times.len() / 5).max(4);
    if times.len() < 8 {
        return Err(lost());
    }
    let t = &times[times.len() - tail..];
    let y = &positions[positions.len() - tail..];
    let speed = slope(t, y);
    let half = tail / 2;
    let s1 = slope(&t[..half], &y[..half]);
    let s2 = slope(&t[half..], &y[half..]);
    let drift = (s1 - s2).abs() / speed.abs().max(1.0);
    if !(drift <= MAX_DRIFT) {
        return Err(Error::NotTraveling { drift });
    }

    // recentre so that u(0) = phase_anchor
    let shift = level_crossing(&grid, &u, cfg.phase_anchor).ok_or_else(lost)?;
    let shifted: Vec<f64> = grid.iter().map(|x| x + shift).collect();
    let ru = shifted.iter().map(|&x| interpolate_cubic(&grid, &u, x)).collect();
    let rv = shifted.iter().map(|&x| interpolate_cubic(&grid, &v, x)).collect();

    let profile = WaveProfile {
        grid,
        u: ru,
        v: rv,
        theta: speed,
        meta: ProfileMeta {
            method: "march".into(),
            residual: 0.0,
            iterations: steps,
            eps_bc: cfg.eps_bc,
            half_length: cfg.half_length,
            intervals: cfg.intervals,
            clipped: 0.0,
            continuation_steps: 0,
        },
    };
    let mut profile = profile;
    profile.meta.residual = super::residual(&profile, p);
    Ok((
        profile,
        MarchDiagnostics {
            speed,
            drift,
            dt,
            dt_limit: limit,
            steps,
            shift_nodes: offset_nodes,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig {
            half_length: 25.0,
            intervals: 250,
            t_final: 80.0,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn slope_of_a_line() {
        let t: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 - 0.25 * t).collect();
        assert!((slope(&t, &y) + 0.25).abs() < 1e-14);
    }

    #[test]
    fn window_shift_fills_with_end_states() {
        let mut x = vec![1.0, 2.0, 3.0, 4.0];
        shift_window(&mut x, 2, -1.0, 9.0);
        assert_eq!(x, vec![3.0, 4.0, 9.0, 9.0]);
        shift_window(&mut x, -1, -1.0, 9.0);
        assert_eq!(x, vec![-1.0, 3.0, 4.0, 9.0]);
    }

    #[test]
    fn time_step_selection() {
        let p = ScaledParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
        let c = cfg();
        let (dt, limit) = choose_dt(&p, &c).unwrap();
        assert!((dt - 0.8 * limit).abs() < 1e-15);
        let (dt, _) = choose_dt(&p, &SolverConfig { dt: Some(4.0 * limit), ..c.clone() }).unwrap();
        assert!(dt <= limit);
        let huge = SolverConfig { dt: Some(5000.0 * limit), ..c };
        assert!(matches!(choose_dt(&p, &huge), Err(Error::CflViolation { .. })));
    }

    #[test]
    fn symmetric_front_stands_still() {
        let p = ScaledParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
        let (w, diag) = march_oracle(&p, &cfg()).unwrap();
        assert!(diag.speed.abs() < 1e-3, "{}", diag.speed);
        assert!(w.level_crossing(0.5).unwrap().abs() < 1e-6);
    }

    #[test]
    fn speed_agrees_with_newton() {
        let p = ScaledParams::new(2.0, 3.0, 2.0, 1.0).unwrap();
        let c = cfg();
        let newton = super::super::solve_wave(&p, &c).unwrap();
        let (_, diag) = march_oracle(&p, &c).unwrap();
        assert!((diag.speed - newton.theta).abs() < 2e-3, "{} vs {}", diag.speed, newton.theta);
    }
}

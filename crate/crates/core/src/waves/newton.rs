//! Damped Newton for the finite difference traveling-wave problem.
//!
//! Unknowns are the interior values `(u_i, v_i)`, interleaved node by node,
//! with `u` at the centre node removed (it is pinned to the phase anchor) and
//! the speed `theta` appended as the last unknown. Pinning by substitution
//! instead of bordering keeps the Jacobian well conditioned: the bordered
//! system carries the translation mode as a near-null vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::banded::BandedWithDenseColumn;
use super::{residual, ProfileMeta, SolverConfig, WaveProfile};
use crate::model::ScaledParams;
use crate::{Error, Result};

/// Negative values down to this size are treated as roundoff and clipped.
const CLIP_FLOOR: f64 = -1e-8;
const JITTER: f64 = 1e-3;

#[derive(Debug, Clone)]
struct State {
    u: Vec<f64>,
    v: Vec<f64>,
    theta: f64,
}

struct Layout {
    intervals: usize,
    centre: usize,
    h: f64,
    n: usize,
}

impl Layout {
    fn new(cfg: &SolverConfig) -> Self {
        let intervals = cfg.intervals;
        Self {
            intervals,
            centre: intervals / 2,
            h: cfg.h(),
            n: 2 * (intervals - 1),
        }
    }

    fn col_u(&self, i: usize) -> Option<usize> {
        if i == 0 || i == self.intervals || i == self.centre {
            return None;
        }
        Some(2 * (i - 1) - usize::from(i > self.centre))
    }

    fn col_v(&self, i: usize) -> Option<usize> {
        if i == 0 || i == self.intervals {
            return None;
        }
        Some(2 * (i - 1) + 1 - usize::from(i >= self.centre))
    }

    fn theta_col(&self) -> usize {
        self.n - 1
    }

    fn apply(&self, s: &State, dx: &[f64], t: f64) -> State {
        let mut out = s.clone();
        for i in 1..self.intervals {
            if let Some(c) = self.col_u(i) {
                out.u[i] += t * dx[c];
            }
            out.v[i] += t * dx[self.col_v(i).unwrap()];
        }
        out.theta += t * dx[self.theta_col()];
        out
    }

    /// Residual in row order: row `2(i-1)` is the `u` equation at node `i`,
    /// row `2(i-1)+1` the `v` equation.
    fn residual(&self, p: &ScaledParams, s: &State) -> Vec<f64> {
        let (h2, h) = (self.h * self.h, self.h);
        let mut f = vec![0.0; self.n];
        for i in 1..self.intervals {
            let (u, v) = (&s.u, &s.v);
            let (fu, fv) = p.reaction(u[i], v[i]);
            f[2 * (i - 1)] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
                + s.theta * (u[i + 1] - u[i - 1]) / (2.0 * h)
                + fu;
            f[2 * (i - 1) + 1] = p.d() * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
                + s.theta * (v[i + 1] - v[i - 1]) / (2.0 * h)
                + fv;
        }
        f
    }

    fn jacobian(&self, p: &ScaledParams, s: &State, m: &mut BandedWithDenseColumn) {
        m.clear();
        let (h2, h) = (self.h * self.h, self.h);
        let (a1, a2, d, k) = (p.a1(), p.a2(), p.d(), p.k());
        let th = self.theta_col();
        for i in 1..self.intervals {
            let (u, v) = (&s.u, &s.v);
            let ru = 2 * (i - 1);
            let rv = ru + 1;
            let mut put = |r: usize, c: Option<usize>, val: f64| {
                if let Some(c) = c {
                    m.add(r, c, val);
                }
            };
            put(ru, self.col_u(i - 1), 1.0 / h2 - s.theta / (2.0 * h));
            put(ru, self.col_u(i + 1), 1.0 / h2 + s.theta / (2.0 * h));
            put(ru, self.col_u(i), -2.0 / h2 + 1.0 - 2.0 * u[i] - a1 * v[i]);
            put(ru, self.col_v(i), -a1 * u[i]);
            put(ru, Some(th), (u[i + 1] - u[i - 1]) / (2.0 * h));

            put(rv, self.col_v(i - 1), d / h2 - s.theta / (2.0 * h));
            put(rv, self.col_v(i + 1), d / h2 + s.theta / (2.0 * h));
            put(rv, self.col_v(i), -2.0 * d / h2 + k * (1.0 - a2 * u[i] - 2.0 * v[i]));
            put(rv, self.col_u(i), -k * a2 * v[i]);
            put(rv, Some(th), (v[i + 1] - v[i - 1]) / (2.0 * h));
        }
    }
}

fn max_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sq_norm(f: &[f64]) -> f64 {
    f.iter().map(|x| x * x).sum()
}

fn initial_guess(grid: &[f64], cfg: &SolverConfig, theta: f64) -> State {
    // tanh front with u(0) = phase_anchor
    let width = 1.0;
    let x0 = -width * (1.0 - 2.0 * cfg.phase_anchor).atanh();
    let n = grid.len();
    let mut u: Vec<f64> = grid.iter().map(|x| 0.5 * (1.0 - ((x - x0) / width).tanh())).collect();
    let mut v: Vec<f64> = u.iter().map(|u| 1.0 - u).collect();
    u[0] = 1.0;
    v[0] = 0.0;
    u[n - 1] = 0.0;
    v[n - 1] = 1.0;
    u[cfg.intervals / 2] = cfg.phase_anchor;
    State { u, v, theta }
}

fn jitter(s: &mut State, seed: u64, centre: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.u.len();
    for i in 1..n - 1 {
        if i != centre {
            s.u[i] += rng.gen_range(-JITTER..JITTER);
        }
        s.v[i] += rng.gen_range(-JITTER..JITTER);
    }
}

/// Returns the converged state and the number of Newton steps taken.
fn newton(p: &ScaledParams, cfg: &SolverConfig, layout: &Layout, mut s: State) -> Result<(State, usize)> {
    let mut m = BandedWithDenseColumn::new(layout.n, 3, 2);
    let mut f = layout.residual(p, &s);
    let mut res = max_norm(&f);
    for it in 0..cfg.max_iter {
        if res <= cfg.tol {
            return Ok((s, it));
        }
        layout.jacobian(p, &s, &mut m);
        if m.factor().is_err() {
            return Err(Error::NoConvergence { residual: res, iterations: it });
        }
        let mut dx: Vec<f64> = f.iter().map(|x| -x).collect();
        m.solve(&mut dx);
        if dx.iter().any(|x| !x.is_finite()) {
            return Err(Error::NoConvergence { residual: res, iterations: it });
        }

        // Armijo backtracking on the squared 2-norm
        let phi0 = sq_norm(&f);
        let mut t = 1.0;
        loop {
            let trial = layout.apply(&s, &dx, t);
            let ft = layout.residual(p, &trial);
            let phi = sq_norm(&ft);
            if phi.is_finite() && phi <= (1.0 - 1e-4 * t) * phi0 {
                s = trial;
                f = ft;
                res = max_norm(&f);
                break;
            }
            t *= 0.5;
            if t < 1e-8 {
                return Err(Error::NoConvergence { residual: res, iterations: it + 1 });
            }
        }
    }
    if res <= cfg.tol {
        return Ok((s, cfg.max_iter));
    }
    Err(Error::NoConvergence { residual: res, iterations: cfg.max_iter })
}

fn lerp(a: &ScaledParams, b: &ScaledParams, t: f64) -> Result<ScaledParams> {
    let mix = |x: f64, y: f64| x + t * (y - x);
    ScaledParams::new(mix(a.a1(), b.a1()), mix(a.a2(), b.a2()), mix(a.d(), b.d()), mix(a.k(), b.k()))
}

/// Parameter homotopy from a symmetric set whose wave is easy to find.
fn continue_from_symmetric(
    p: &ScaledParams,
    cfg: &SolverConfig,
    layout: &Layout,
    grid: &[f64],
) -> Result<(State, usize, usize)> {
    let base = ScaledParams::new(2.0, 2.0, 1.0, 1.0)?;
    let (mut s, mut total) = newton(&base, cfg, layout, initial_guess(grid, cfg, 0.0))?;
    let (mut t, mut dt, mut steps) = (0.0f64, 0.125f64, 0);
    while t < 1.0 {
        let next = (t + dt).min(1.0);
        match newton(&lerp(&base, p, next)?, cfg, layout, s.clone()) {
            Ok((ns, it)) => {
                s = ns;
                total += it;
                t = next;
                steps += 1;
                dt = (2.0 * dt).min(0.25);
            }
            Err(e) => {
                dt *= 0.5;
                if dt < 1.0 / 1024.0 {
                    return Err(e);
                }
            }
        }
    }
    Ok((s, total, steps))
}

/// Traveling wave of the scaled system on `[-L, L]`.
///
/// Newton starts from a tanh front (with `p.theta()` as the speed guess when
/// present). If a continuation path is configured the solver walks it first;
/// otherwise a failed direct solve falls back to continuation from
/// `(a1, a2, d, k) = (2, 2, 1, 1)`.
pub fn solve_wave(p: &ScaledParams, cfg: &SolverConfig) -> Result<WaveProfile> {
    cfg.validate()?;
    p.require_bistable()?;
    let layout = Layout::new(cfg);
    let grid = cfg.grid();
    let mut guess = initial_guess(&grid, cfg, p.theta().unwrap_or(0.0));
    if let Some(seed) = cfg.jitter_seed {
        jitter(&mut guess, seed, layout.centre);
    }

    let (state, iterations, steps) = match &cfg.continuation {
        Some(path) => {
            let (mut s, mut total) = (guess, 0);
            for q in path {
                q.require_bistable()?;
                let (ns, it) = newton(q, cfg, &layout, s)?;
                s = ns;
                total += it;
            }
            let (s, it) = newton(p, cfg, &layout, s)?;
            (s, total + it, path.len())
        }
        None => match newton(p, cfg, &layout, guess) {
            Ok((s, it)) => (s, it, 0),
            Err(_) => continue_from_symmetric(p, cfg, &layout, &grid)?,
        },
    };

    let State { mut u, mut v, theta } = state;
    let min = u.iter().chain(&v).copied().fold(f64::INFINITY, f64::min);
    if min < CLIP_FLOOR {
        return Err(Error::NonPositiveSolution { min });
    }
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x = x.max(0.0));

    let mut profile = WaveProfile {
        grid,
        u,
        v,
        theta,
        meta: ProfileMeta {
            method: "newton".into(),
            residual: 0.0,
            iterations,
            eps_bc: cfg.eps_bc,
            half_length: cfg.half_length,
            intervals: cfg.intervals,
            clipped: min.min(0.0),
            continuation_steps: steps,
        },
    };
    profile.meta.residual = residual(&profile, p);
    Ok(profile)
}

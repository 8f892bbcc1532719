//! Sharper lower bound from the tangent line to the conic `F(u, v) = 0`.
//!
//! The outer `q`-line `alpha u + d beta v = lambda2` is pushed out until it
//! touches `F = 0`. Eliminating the tangency point from
//!
//! ```text
//! alpha u + d beta v = lambda2,   F(u, v) = 0,   F_u / alpha = F_v / (d beta)
//! ```
//!
//! leaves the quadratic `mu2 lambda2^2 + mu1 lambda2 + mu0 = 0`, whose
//! discriminant is positive exactly when `d` lies strictly inside the window
//! returned by [`window`]. Of the two roots, one has its tangency point in
//! the open first quadrant; that is the one returned.

use serde::{Deserialize, Serialize};

use crate::barrier::{f_eval, f_grad, BoundPair, Segment, Weights};
use crate::model::ScaledParams;
use crate::{Error, Result};

/// A root of the tangency quadratic together with its tangency point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentRoot {
    pub lambda2: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentSolution {
    pub lambda2: f64,
    pub u_t: f64,
    pub v_t: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub disc: f64,
    pub lambda1: f64,
    pub eta: f64,
    pub d_window: (f64, f64),
    /// The other root; its tangency point leaves the first quadrant.
    pub rejected: TangentRoot,
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
}

impl TangentSolution {
    /// `lambda2 min[d, 1/d]`.
    pub fn lower_bound(&self) -> f64 {
        self.lambda1
    }

    /// Inner `q`-line, tangent `q`-line and the `p`-line.
    pub fn segments(&self) -> [Segment; 3] {
        let qb = self.d * self.beta;
        [
            Segment::level_line(self.alpha, qb, self.lambda1),
            Segment::level_line(self.alpha, qb, self.lambda2),
            Segment::level_line(self.alpha, self.beta, self.eta),
        ]
    }
}

fn s_coefficient(p: &ScaledParams, w: &Weights) -> f64 {
    w.alpha * p.a1() + p.a2() * w.beta * p.k()
}

/// Open interval of diffusion ratios `d` for which the tangent construction
/// applies.
pub fn window(p: &ScaledParams, w: &Weights) -> Result<(f64, f64)> {
    p.require_bistable()?;
    let s = s_coefficient(p, w);
    let root = (s * s - 4.0 * w.alpha * w.beta * p.k()).sqrt();
    // Product of the endpoints is alpha k / beta; use it for the small one.
    let d_max = (s + root) / (2.0 * w.beta);
    let d_min = 2.0 * w.alpha * p.k() / (s + root);
    Ok((d_min, d_max))
}

fn tangency_point(p: &ScaledParams, w: &Weights, den: f64, lambda2: f64) -> (f64, f64) {
    let (alpha, beta, d, k) = (w.alpha, w.beta, p.d(), p.k());
    let s = s_coefficient(p, w);
    let u = (lambda2 * (2.0 * alpha * k - d * s) + alpha * beta * d * (d - k)) / (2.0 * alpha * den);
    let v = (lambda2 * (s - 2.0 * beta * d) + alpha * beta * (d - k)) / (-2.0 * beta * den);
    (u, v)
}

pub fn solve_tangent(p: &ScaledParams, w: &Weights) -> Result<TangentSolution> {
    let (d_min, d_max) = window(p, w)?;
    let (alpha, beta, d, k) = (w.alpha, w.beta, p.d(), p.k());
    let s = s_coefficient(p, w);
    let den = -d * s + beta * d * d + alpha * k;
    if !(den < 0.0 && d > d_min && d < d_max) {
        return Err(Error::OutsideWindow { d, d_min, d_max });
    }

    let mu2 = (s * s - 4.0 * alpha * beta * k) / (4.0 * alpha * beta * den);
    let mu1 = -((d + k) * s - 2.0 * k * (alpha + beta * d)) / (2.0 * den);
    let mu0 = alpha * beta * (d - k) * (d - k) / (4.0 * den);
    let disc = k * (alpha * (1.0 - p.a1()) + k * beta * (1.0 - p.a2())) / den;

    let roots = if mu0 == 0.0 {
        [-mu1 / mu2, 0.0]
    } else {
        let t = -0.5 * (mu1 + mu1.signum() * disc.sqrt());
        [t / mu2, mu0 / t]
    };

    let candidates = roots.map(|lambda2| {
        let (u, v) = tangency_point(p, w, den, lambda2);
        TangentRoot { lambda2, u, v }
    });
    let in_quadrant = |r: &TangentRoot| r.u > 0.0 && r.v > 0.0;
    let (chosen, rejected) = match (in_quadrant(&candidates[0]), in_quadrant(&candidates[1])) {
        (true, false) => (candidates[0], candidates[1]),
        (false, true) => (candidates[1], candidates[0]),
        _ => return Err(Error::NoAdmissibleTangent),
    };
    debug_assert!(rejected.u.min(rejected.v) <= 0.0);

    let lambda2 = chosen.lambda2;
    let (lambda1, eta) = if d >= 1.0 {
        (lambda2 / d, lambda2 / d)
    } else {
        (lambda2 * d, lambda2)
    };

    Ok(TangentSolution {
        lambda2,
        u_t: chosen.u,
        v_t: chosen.v,
        mu0,
        mu1,
        mu2,
        disc,
        lambda1,
        eta,
        d_window: (d_min, d_max),
        rejected,
        alpha,
        beta,
        d,
    })
}

/// `lambda2 min[d, 1/d]` with `lambda2` from [`solve_tangent`].
pub fn sharp_lower_bound(p: &ScaledParams, w: &Weights) -> Result<f64> {
    let sol = solve_tangent(p, w)?;
    Ok(sol.lambda2 * p.d().min(1.0 / p.d()))
}

/// `4/(a1 + a2 + 2) <= u + v <= 1` when `d = k = 1`.
pub fn sum_bounds(a1: f64, a2: f64) -> Result<BoundPair> {
    if !(a1 > 1.0 && a2 > 1.0) {
        return Err(Error::NotBistable(format!(
            "need a1 > 1 and a2 > 1, got a1 = {a1}, a2 = {a2}"
        )));
    }
    Ok(BoundPair {
        lower: 4.0 / (a1 + a2 + 2.0),
        upper: 1.0,
        quantity: "u + v".into(),
    })
}

/// Residuals of the three tangency conditions at the returned point:
/// `(F, F_u/alpha - F_v/(d beta), alpha u + d beta v - lambda2)`.
pub fn tangency_residuals(p: &ScaledParams, w: &Weights, sol: &TangentSolution) -> (f64, f64, f64) {
    let f = f_eval(p, w, sol.u_t, sol.v_t);
    let (fu, fv) = f_grad(p, w, sol.u_t, sol.v_t);
    (
        f,
        fu / w.alpha - fv / (p.d() * w.beta),
        w.q(p.d(), sol.u_t, sol.v_t) - sol.lambda2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{bounds_scaled, hyperbola_check};
    use rand::{Rng, SeedableRng};

    fn sp(a1: f64, a2: f64, d: f64, k: f64) -> ScaledParams {
        ScaledParams::new(a1, a2, d, k).unwrap()
    }

    fn w(alpha: f64, beta: f64) -> Weights {
        Weights::new(alpha, beta).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn worked_example_d_two() {
        let sol = solve_tangent(&sp(2.0, 3.0, 2.0, 1.0), &w(17.0, 18.0)).unwrap();
        let root = 4611f64.sqrt();
        let lambda2 = 153.0 * (79.0 + root) / 1630.0;
        assert!(rel(sol.lambda2, lambda2) < 1e-12);
        assert!(rel(sol.u_t, 3.0 * (2349.0 + 71.0 * root) / 47270.0) < 1e-12);
        assert!(rel(sol.v_t, 17.0 * (1131.0 + 4.0 * root) / 141810.0) < 1e-12);
        assert!(rel(sol.lambda1, lambda2 / 2.0) < 1e-12);
        assert_eq!(sol.lambda1, sol.eta);
        assert!((sol.u_t - 0.455).abs() < 5e-4 && (sol.v_t - 0.168).abs() < 5e-4);

        let rej = sol.rejected;
        assert!(rel(rej.lambda2, 153.0 * (79.0 - root) / 1630.0) < 1e-12);
        assert!(rel(rej.u, 3.0 * (2349.0 - 71.0 * root) / 47270.0) < 1e-12);
        assert!(rel(rej.v, 17.0 * (1131.0 - 4.0 * root) / 141810.0) < 1e-12);
        assert!(rej.u < 0.0);
    }

    #[test]
    fn worked_example_d_two_thirds() {
        let d = 2.0 / 3.0;
        let sol = solve_tangent(&sp(2.0, 3.0, d, 1.0), &w(17.0, 18.0)).unwrap();
        let lambda2 = 51.0 * (133.0 + 16059f64.sqrt()) / 1630.0;
        assert!(rel(sol.lambda2, lambda2) < 1e-12);
        assert!(rel(sol.lambda1, 17.0 / 815.0 * (133.0 + 16059f64.sqrt())) < 1e-12);
        assert_eq!(sol.eta, sol.lambda2);
    }

    #[test]
    fn window_example() {
        let p = sp(2.0, 3.0, 2.0, 1.0);
        let wt = w(17.0, 18.0);
        let (lo, hi) = window(&p, &wt).unwrap();
        let r = 6520f64.sqrt();
        assert!(rel(lo, (88.0 - r) / 36.0) < 1e-12);
        assert!(rel(hi, (88.0 + r) / 36.0) < 1e-12);
        assert!((lo - 0.2014).abs() < 1e-4 && (hi - 4.687).abs() < 1e-3);
        let s = 88.0;
        assert_eq!(s * s - 4.0 * 17.0 * 18.0, hyperbola_check(&p, &wt));
        // endpoints are roots of the denominator of the discriminant
        for d in [lo, hi] {
            let den = -d * s + 18.0 * d * d + 17.0;
            assert!(den.abs() < 1e-12);
        }
    }

    #[test]
    fn outside_window_is_an_error() {
        let wt = w(17.0, 18.0);
        for d in [0.1, 5.0, 100.0] {
            assert!(matches!(
                solve_tangent(&sp(2.0, 3.0, d, 1.0), &wt),
                Err(Error::OutsideWindow { .. })
            ));
        }
        let (lo, hi) = window(&sp(2.0, 3.0, 1.0, 1.0), &wt).unwrap();
        assert!(solve_tangent(&sp(2.0, 3.0, hi, 1.0), &wt).is_err());
        assert!(solve_tangent(&sp(2.0, 3.0, lo, 1.0), &wt).is_err());
        assert!(matches!(
            solve_tangent(&sp(0.5, 3.0, 1.0, 1.0), &wt),
            Err(Error::NotBistable(_))
        ));
    }

    #[test]
    fn sharp_bound_examples() {
        let b = sharp_lower_bound(&sp(2.0, 3.0, 2.0, 1.0), &w(17.0, 18.0)).unwrap();
        assert!((b - 6.895).abs() < 1e-3);
        assert!(b > 17.0 / 6.0);
        let b = sharp_lower_bound(&sp(2.0, 3.0, 1.0, 1.0), &w(1.0, 1.0)).unwrap();
        assert!(rel(b, 4.0 / 7.0) < 1e-14);
        let near = sharp_lower_bound(&sp(1.0 + 1e-9, 1.0 + 1e-9, 1.0, 1.0), &w(1.0, 1.0)).unwrap();
        assert!((near - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sum_bounds_example() {
        let b = sum_bounds(2.0, 3.0).unwrap();
        assert_eq!((b.lower, b.upper), (4.0 / 7.0, 1.0));
        assert!((sum_bounds(1.0 + 1e-12, 1.0 + 1e-12).unwrap().lower - 1.0).abs() < 1e-11);
        assert!(sum_bounds(1.0, 3.0).is_err());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (a1, a2) = (rng.gen_range(1.0001..20.0), rng.gen_range(1.0001..20.0));
            assert!(sum_bounds(a1, a2).unwrap().lower >= (1.0 / a1).min(1.0 / a2));
        }
    }

    #[test]
    fn degenerate_d_equals_k() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (a1, a2) = (rng.gen_range(1.0001..10.0), rng.gen_range(1.0001..10.0));
            let sol = solve_tangent(&sp(a1, a2, 1.0, 1.0), &w(1.0, 1.0)).unwrap();
            assert_eq!(sol.mu0, 0.0);
            assert!(rel(sol.lambda2, -sol.mu1 / sol.mu2) < 1e-15);
            assert!(rel(sol.lambda2, 4.0 / (a1 + a2 + 2.0)) < 1e-12);
        }
    }

    #[test]
    fn random_solutions_satisfy_invariants() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let (mut checked, mut skipped) = (0, 0);
        while checked < 1000 {
            let mut p = sp(rng.gen_range(1.01..6.0), rng.gen_range(1.01..6.0), 1.0, rng.gen_range(0.2..5.0));
            let wt = w(rng.gen_range(0.1..20.0), rng.gen_range(0.1..20.0));
            let (lo, hi) = window(&p, &wt).unwrap();
            let t: f64 = rng.gen_range(0.02..0.98);
            let d = lo + t * (hi - lo);
            p = sp(p.a1(), p.a2(), d, p.k());
            let sol = match solve_tangent(&p, &wt) {
                Ok(s) => s,
                // near the window ends the tangency point can leave the quadrant
                Err(Error::OutsideWindow { .. } | Error::NoAdmissibleTangent) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => panic!("{e} for {p:?} {wt:?}"),
            };
            let quad = sol.mu2 * sol.lambda2 * sol.lambda2 + sol.mu1 * sol.lambda2 + sol.mu0;
            let scale = (sol.mu2 * sol.lambda2 * sol.lambda2).abs() + (sol.mu1 * sol.lambda2).abs() + sol.mu0.abs();
            assert!(quad.abs() <= 1e-10 * scale);
            let disc_mu = sol.mu1 * sol.mu1 - 4.0 * sol.mu0 * sol.mu2;
            assert!(rel(disc_mu, sol.disc) < 1e-8);
            assert!(sol.mu2 < 0.0 && sol.mu1 > 0.0 && sol.mu0 <= 0.0);

            let (f, grad, line) = tangency_residuals(&p, &wt, &sol);
            let fs = wt.alpha + wt.beta * p.k();
            assert!(f.abs() <= 1e-8 * fs, "F residual {f}");
            assert!(grad.abs() <= 1e-8 * (1.0 + fs / wt.alpha + fs / (d * wt.beta)));
            assert!(line.abs() <= 1e-10 * sol.lambda2);
            assert!(sol.u_t > 0.0 && sol.v_t > 0.0);
            assert!(sol.rejected.u.min(sol.rejected.v) <= 0.0);

            let barrier = bounds_scaled(&p, &wt).unwrap().lower;
            let sharp = sharp_lower_bound(&p, &wt).unwrap();
            assert!(sharp >= barrier - 1e-12 * barrier.max(1.0), "{sharp} < {barrier}");
            checked += 1;
        }
        assert!(skipped < checked / 4, "{skipped} skipped");
    }
}

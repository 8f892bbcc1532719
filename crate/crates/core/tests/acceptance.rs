//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nbarrier_core::barrier::{lower_levels, upper_levels};
use nbarrier_core::nonexist::reduced_lower_bound;
use nbarrier_core::waves::{march_oracle, CheckStatus};
use nbarrier_core::{
    bound_verify, bounds_scaled, bounds_unscaled, check, residual, scale, solve_tangent, solve_wave,
    CaseTag, ScaledParams, SolverConfig, ThreeSpeciesParams, UnscaledParams, Weights,
};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sp(a1: f64, a2: f64, d: f64, k: f64) -> ScaledParams {
    ScaledParams::new(a1, a2, d, k).expect("valid parameters")
}

fn wt(alpha: f64, beta: f64) -> Weights {
    Weights::new(alpha, beta).expect("valid weights")
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_levels() -> Outcome {
    let (a1, a2) = (q(2, 1), q(3, 1));
    let lower = [
        ((17, 18), q(2, 1), (q(17, 6), q(17, 3), q(17, 6))),
        ((17, 5), q(2, 1), (q(5, 2), q(5, 1), q(5, 2))),
        ((17, 18), q(2, 3), (q(34, 9), q(17, 3), q(17, 3))),
        ((17, 18), q(1, 2), (q(9, 4), q(9, 2), q(9, 2))),
    ];
    let upper = [
        ((17, 18), q(2, 1), (q(72, 1), q(36, 1), q(36, 1))),
        ((17, 5), q(2, 1), (q(34, 1), q(17, 1), q(17, 1))),
        ((17, 33), q(2, 3), (q(33, 1), q(22, 1), q(33, 1))),
        ((17, 18), q(1, 2), (q(34, 1), q(17, 1), q(34, 1))),
    ];
    let mut worst = 0f64;
    let mut check_triple = |exact: (CaseTag, Q, Q, Q), float: (CaseTag, f64, f64, f64), want: (Q, Q, Q)| {
        ensure((exact.1, exact.2, exact.3) == want, || format!("exact {exact:?} != {want:?}"))?;
        for (got, want) in [(float.1, want.0), (float.2, want.1), (float.3, want.2)] {
            worst = worst.max(rel(got, to_f64(want)));
        }
        ensure(float.0 == exact.0, || "case tags differ between modes".into())
    };
    for ((al, be), d, want) in lower {
        let exact = lower_levels(a1, a2, d, q(al, 1), q(be, 1));
        let float = lower_levels(2.0, 3.0, to_f64(d), al as f64, be as f64);
        check_triple(exact, float, want)?;
    }
    for ((al, be), d, want) in upper {
        let exact = upper_levels(d, q(al, 1), q(be, 1));
        let float = upper_levels(to_f64(d), al as f64, be as f64);
        check_triple(exact, float, want)?;
    }
    ensure(worst <= 1e-14, || format!("float mode off by {worst:e}"))?;
    Ok(format!("8/8 triples exact, float max rel err {worst:e}"))
}

fn tangent_worked_example() -> Outcome {
    let w = wt(17.0, 18.0);
    let sol = solve_tangent(&sp(2.0, 3.0, 2.0, 1.0), &w).map_err(|e| e.to_string())?;
    let exact = 153.0 * (79.0 + 4611f64.sqrt()) / 1630.0;
    ensure(rel(sol.lambda2, exact) <= 1e-9, || format!("lambda2 {} vs {exact}", sol.lambda2))?;
    ensure((sol.u_t - 0.455).abs() < 5e-4 && (sol.v_t - 0.168).abs() < 5e-4, || {
        format!("tangency point ({}, {})", sol.u_t, sol.v_t)
    })?;
    ensure((sol.lower_bound() - 6.895).abs() < 5e-4, || format!("lambda1 {}", sol.lower_bound()))?;
    let sol23 = solve_tangent(&sp(2.0, 3.0, 2.0 / 3.0, 1.0), &w).map_err(|e| e.to_string())?;
    ensure((sol23.lambda2 - 8.126).abs() < 5e-4, || format!("d=2/3 lambda2 {}", sol23.lambda2))?;
    ensure((sol23.lower_bound() - 5.418).abs() < 5e-4, || format!("d=2/3 lambda1 {}", sol23.lower_bound()))?;
    Ok(format!(
        "lambda2 {:.6} at ({:.4}, {:.4}), lambda1 {:.4}; d=2/3: lambda2 {:.4}, lambda1 {:.4}",
        sol.lambda2,
        sol.u_t,
        sol.v_t,
        sol.lower_bound(),
        sol23.lambda2,
        sol23.lower_bound()
    ))
}

fn symmetric_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let w = wt(1.0, 1.0);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let (a1, a2) = (rng.gen_range(1.0001..20.0), rng.gen_range(1.0001..20.0));
        let sol = solve_tangent(&sp(a1, a2, 1.0, 1.0), &w).map_err(|e| format!("({a1}, {a2}): {e}"))?;
        worst = worst.max(rel(sol.lambda2, 4.0 / (a1 + a2 + 2.0)));
    }
    ensure(worst <= 1e-12, || format!("max rel err {worst:e}"))?;
    Ok(format!("1000 draws, max rel err {worst:e}"))
}

fn bound_containment() -> Outcome {
    let cfg = SolverConfig::default();
    let weights = [(17.0, 18.0), (17.0, 5.0), (1.0, 1.0)];
    let (mut passes, mut tangent_checks) = (0, 0);
    let mut worst_residual = 0f64;
    for d in [0.5, 2.0 / 3.0, 1.0, 2.0] {
        let p = sp(2.0, 3.0, d, 1.0);
        let profile = solve_wave(&p, &cfg).map_err(|e| format!("d = {d}: {e}"))?;
        let r = residual(&profile, &p);
        worst_residual = worst_residual.max(r);
        ensure(r <= 1e-8, || format!("d = {d}: residual {r:e}"))?;
        for (alpha, beta) in weights {
            let report = bound_verify(&profile, &p, &wt(alpha, beta)).map_err(|e| e.to_string())?;
            ensure(report.slack <= 1e-6, || "slack too loose".into())?;
            if let Some(bad) = report.failures().next() {
                return Err(format!("d = {d}, weights ({alpha}, {beta}): {} margin {:?}", bad.name, bad.margin));
            }
            ensure(report.passed, || format!("d = {d}, weights ({alpha}, {beta}): boundary states off"))?;
            if report.check("tangent_lower").is_some_and(|c| c.status == CheckStatus::Pass) {
                tangent_checks += 1;
            }
            passes += 1;
        }
    }
    Ok(format!(
        "{passes}/12 profiles within bounds ({tangent_checks} with the tangent bound), max residual {worst_residual:e}"
    ))
}

fn oracle_equivalence() -> Outcome {
    let cfg = SolverConfig {
        half_length: 30.0,
        intervals: 600,
        t_final: 120.0,
        ..SolverConfig::default()
    };
    let mut summary = Vec::new();
    for (a1, a2, d) in [(2.0, 3.0, 2.0), (2.0, 3.0, 0.5), (2.0, 2.0, 1.0)] {
        let p = sp(a1, a2, d, 1.0);
        let newton = solve_wave(&p, &cfg).map_err(|e| e.to_string())?;
        let (oracle, diag) = march_oracle(&p, &cfg).map_err(|e| e.to_string())?;
        let diff = newton.max_abs_diff(&oracle);
        let dtheta = (newton.theta - diag.speed).abs();
        ensure(diff <= 1e-2, || format!("({a1}, {a2}, {d}): profiles differ by {diff:e}"))?;
        ensure(dtheta <= 2e-3, || format!("({a1}, {a2}, {d}): speeds {} vs {}", newton.theta, diag.speed))?;
        if a1 == a2 {
            ensure(newton.theta.abs() <= 1e-3 && diag.speed.abs() <= 1e-3, || "symmetric speed not zero".into())?;
        }
        summary.push(format!("theta {:+.5}/{:+.5} diff {diff:.1e}", newton.theta, diag.speed));
    }
    Ok(summary.join("; "))
}

fn speed_and_k_independence() -> Outcome {
    let w = wt(17.0, 18.0);
    let cfg = SolverConfig {
        half_length: 30.0,
        intervals: 600,
        ..SolverConfig::default()
    };
    let mut reference: Option<(u64, u64)> = None;
    let mut profiles = Vec::new();
    for k in [0.5, 1.0, 2.0] {
        let p = sp(2.0, 3.0, 2.0, k);
        let b = bounds_scaled(&p, &w).map_err(|e| e.to_string())?;
        let bits = (b.lower.to_bits(), b.upper.to_bits());
        ensure(*reference.get_or_insert(bits) == bits, || format!("bounds change at k = {k}"))?;
        let profile = solve_wave(&p, &cfg).map_err(|e| e.to_string())?;
        let report = bound_verify(&profile, &p, &w).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("verification fails at k = {k}"))?;
        profiles.push(profile);
    }
    let mut min_diff = f64::INFINITY;
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            min_diff = min_diff.min(profiles[i].max_abs_diff(&profiles[j]));
        }
    }
    ensure(min_diff >= 1e-3, || format!("profiles too close: {min_diff:e}"))?;
    Ok(format!(
        "bounds bitwise equal, speeds {:+.4} {:+.4} {:+.4}, min profile diff {min_diff:.3}",
        profiles[0].theta, profiles[1].theta, profiles[2].theta
    ))
}

fn random_three_species(rng: &mut ChaCha8Rng) -> ThreeSpeciesParams {
    ThreeSpeciesParams {
        d1: rng.gen_range(0.2..3.0),
        d2: rng.gen_range(0.2..3.0),
        d3: rng.gen_range(0.2..3.0),
        sigma1: rng.gen_range(0.5..2.0),
        sigma2: rng.gen_range(0.5..2.0),
        sigma3: 10f64.powf(rng.gen_range(-4.0..0.0)),
        c11: rng.gen_range(0.5..2.0),
        c12: rng.gen_range(0.5..5.0),
        c13: rng.gen_range(0.1..2.0),
        c21: rng.gen_range(0.5..5.0),
        c22: rng.gen_range(0.5..2.0),
        c23: rng.gen_range(0.1..2.0),
        c31: rng.gen_range(0.1..3.0),
        c32: rng.gen_range(0.1..3.0),
        c33: rng.gen_range(0.5..2.0),
    }
}

fn proof_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut certified, mut inconclusive, mut draws) = (0, 0, 0);
    let mut worst = f64::INFINITY;
    while certified < 100 || inconclusive < 100 {
        draws += 1;
        ensure(draws < 1_000_000, || "could not sample enough parameter sets".into())?;
        let p = random_three_species(&mut rng);
        let verdict = check(&p).map_err(|e| e.to_string())?;
        if verdict.is_certified() {
            if certified == 100 {
                continue;
            }
            let lower = reduced_lower_bound(&p).map_err(|e| e.to_string())?;
            worst = worst.min(lower - p.sigma3);
            ensure(lower >= p.sigma3 - 1e-12, || format!("{lower} < sigma3 = {} for {p:?}", p.sigma3))?;
            certified += 1;
        } else if inconclusive < 100 {
            inconclusive += 1;
        }
    }
    Ok(format!("100 certified sets, min(lower - sigma3) = {worst:e}; 100 inconclusive sampled"))
}

fn scaling_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0f64;
    let mut n = 0;
    while n < 1000 {
        let p = UnscaledParams {
            d1: rng.gen_range(0.1..5.0),
            d2: rng.gen_range(0.1..5.0),
            sigma1: rng.gen_range(0.1..5.0),
            sigma2: rng.gen_range(0.1..5.0),
            c11: rng.gen_range(0.1..5.0),
            c12: rng.gen_range(0.1..5.0),
            c21: rng.gen_range(0.1..5.0),
            c22: rng.gen_range(0.1..5.0),
        };
        if !p.bis() {
            continue;
        }
        let w = wt(rng.gen_range(0.1..20.0), rng.gen_range(0.1..20.0));
        let raw = bounds_unscaled(&p, &w).map_err(|e| e.to_string())?;
        let (s, _) = scale(&p).map_err(|e| e.to_string())?;
        let ws = wt(w.alpha * p.sigma1 / p.c11, w.beta * p.sigma2 / p.c22);
        let scaled = bounds_scaled(&s, &ws).map_err(|e| e.to_string())?;
        worst = worst
            .max(rel(raw.lower, p.d1 * scaled.lower))
            .max(rel(raw.upper, p.d1 * scaled.upper));
        n += 1;
    }
    ensure(worst <= 1e-12, || format!("max rel err {worst:e}"))?;
    Ok(format!("1000 bistable draws, max rel err {worst:e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden barrier levels", golden_levels),
        ("tangent worked example", tangent_worked_example),
        ("symmetric tangent reduction", symmetric_reduction),
        ("bound containment on computed waves", bound_containment),
        ("Newton vs time-marching oracle", oracle_equivalence),
        ("independence from speed and k", speed_and_k_independence),
        ("nonexistence proof chain", proof_chain),
        ("scaling consistency", scaling_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

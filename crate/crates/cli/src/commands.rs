use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use nbarrier_core::nonexist::{reduced_lower_bound, CSV_HEADER, SCOPE};
use nbarrier_core::waves::{CheckStatus, ProfileMeta};
use nbarrier_core::{
    bound_verify, bounds_scaled, check, lower_barrier_scaled, march_oracle, reduced_system_margin,
    solve_tangent, solve_wave, sweep, upper_barrier_scaled, Barrier, Error, ScaledParams,
    SolverConfig, ThreeSpeciesParams, ThreeSpeciesVerdict, VerificationReport, WaveProfile,
    Weights,
};
use serde::Serialize;

use crate::inputs::{self, ModelArgs, Resolved, SolverArgs, WeightArgs};
use crate::output::{csv_document, json, sha256_hex, Emitter, InputHash};
use crate::svg::{self, Figure, LevelLine, LineKind};
use crate::{CliError, Command, Format, OutputArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Lower,
    Upper,
    Tangent,
}

pub(crate) fn dispatch(
    command: Command,
    argv: &[OsString],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    // where the results go is not an input
    let mut hash = InputHash::default();
    let mut args = argv.iter().skip(1).map(|a| a.to_string_lossy());
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            hash.update(a.as_bytes());
        }
    }
    match command {
        Command::Bounds { model, weights, output } => bounds(&model, &weights, &output, hash, stdout, stderr),
        Command::Tangent { model, weights, output } => tangent(&model, &weights, &output, hash, stdout, stderr),
        Command::Wave { model, solver, output, march } => wave(&model, &solver, &output, march, hash, stdout, stderr),
        Command::Verify { model, weights, solver, output, profile } => {
            verify(&model, &weights, &solver, &output, profile.as_deref(), hash, stdout, stderr)
        }
        Command::Nonexist { config, require_certified, output } => {
            nonexist(&config, require_certified, &output, hash, stdout, stderr)
        }
        Command::Sweep { config, axis, values, output } => sweep_cmd(&config, &axis, &values, &output, hash, stdout, stderr),
        Command::Plot { model, weights, solver, barrier, wave, profile, out } => {
            let mut hash = hash;
            let r = inputs::resolve(&model, Some(&weights), Some(&solver), &mut hash)?;
            let trajectory = match (&profile, wave) {
                (Some(path), _) => trajectory_from_csv(path, &mut hash)?,
                (None, true) => {
                    let prof = solve_wave(&r.params, &r.solver)?;
                    prof.u.iter().copied().zip(prof.v.iter().copied()).collect()
                }
                (None, false) => Vec::new(),
            };
            let fig = figure(&r, barrier, trajectory)?;
            let mut em = Emitter::new(out, stdout);
            em.emit("plot.svg", &svg::render(&fig))?;
            let _ = writeln!(stderr, "{}", fig.title);
            em.finish("plot", &hash)
        }
    }
}

fn say(stderr: &mut dyn Write, msg: std::fmt::Arguments<'_>) {
    let _ = writeln!(stderr, "{msg}");
}

fn weights_of(r: &Resolved) -> Weights {
    r.weights.expect("weights were requested")
}

#[derive(Serialize)]
struct SharpLower {
    value: f64,
    source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize)]
struct BoundsReport {
    params: ScaledParams,
    weights: Weights,
    quantity: String,
    lower: f64,
    upper: f64,
    lower_barrier: Barrier,
    upper_barrier: Barrier,
    sharp_lower: SharpLower,
}

fn bounds(
    model: &ModelArgs,
    weights: &WeightArgs,
    output: &OutputArgs,
    mut hash: InputHash,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let r = inputs::resolve(model, Some(weights), None, &mut hash)?;
    let (p, w) = (r.params, weights_of(&r));
    let pair = bounds_scaled(&p, &w)?;
    // the tangent bound is only reported when it exists; otherwise say why
    let sharp = match solve_tangent(&p, &w) {
        Ok(t) => SharpLower { value: t.lower_bound(), source: "tangent", reason: None },
        Err(e @ (Error::OutsideWindow { .. } | Error::NoAdmissibleTangent)) => SharpLower {
            value: pair.lower,
            source: "barrier",
            reason: Some(e.to_string()),
        },
        Err(e) => return Err(e.into()),
    };
    let report = BoundsReport {
        params: p,
        weights: w,
        quantity: pair.quantity.clone(),
        lower: pair.lower,
        upper: pair.upper,
        lower_barrier: lower_barrier_scaled(&p, &w)?,
        upper_barrier: upper_barrier_scaled(&p, &w)?,
        sharp_lower: sharp,
    };
    let mut em = Emitter::new(output.out.clone(), stdout);
    match output.format {
        Format::Json => em.emit("bounds.json", &json(&report)?)?,
        Format::Csv => {
            let header = ["a1", "a2", "d", "k", "alpha", "beta", "lower", "upper", "sharp_lower", "sharp_source"];
            let row = vec![
                p.a1().to_string(),
                p.a2().to_string(),
                p.d().to_string(),
                p.k().to_string(),
                w.alpha.to_string(),
                w.beta.to_string(),
                report.lower.to_string(),
                report.upper.to_string(),
                report.sharp_lower.value.to_string(),
                report.sharp_lower.source.to_string(),
            ];
            em.emit("bounds.csv", &csv_document(&header, &[row])?)?
        }
    }
    say(
        stderr,
        format_args!(
            "{} in [{}, {}]; sharpest lower bound {} ({})",
            report.quantity, report.lower, report.upper, report.sharp_lower.value, report.sharp_lower.source
        ),
    );
    em.finish("bounds", &hash)
}

fn tangent(
    model: &ModelArgs,
    weights: &WeightArgs,
    output: &OutputArgs,
    mut hash: InputHash,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let r = inputs::resolve(model, Some(weights), None, &mut hash)?;
    let sol = solve_tangent(&r.params, &weights_of(&r))?;
    let mut em = Emitter::new(output.out.clone(), stdout);
    match output.format {
        Format::Json => em.emit("tangent.json", &json(&sol)?)?,
        Format::Csv => {
            let header = ["lambda2", "u_t", "v_t", "lambda1", "eta", "d_min", "d_max"];
            let row = [sol.lambda2, sol.u_t, sol.v_t, sol.lambda1, sol.eta, sol.d_window.0, sol.d_window.1]
                .iter()
                .map(f64::to_string)
                .collect();
            em.emit("tangent.csv", &csv_document(&header, &[row])?)?
        }
    }
    say(
        stderr,
        format_args!(
            "tangent line at level {} touches F = 0 at ({}, {}); lower bound {}",
            sol.lambda2, sol.u_t, sol.v_t, sol.lambda1
        ),
    );
    em.finish("tangent", &hash)
}

fn config_hash(p: &ScaledParams, cfg: &SolverConfig) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Key<'a> {
        params: &'a ScaledParams,
        config: &'a SolverConfig,
    }
    let bytes = serde_json::to_vec(&Key { params: p, config: cfg }).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(sha256_hex(&bytes))
}

fn profile_csv(prof: &WaveProfile) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = (0..prof.grid.len())
        .map(|i| vec![prof.grid[i].to_string(), prof.u[i].to_string(), prof.v[i].to_string()])
        .collect();
    csv_document(&["x", "u", "v"], &rows)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    theta: f64,
    residual: f64,
    config_hash: String,
    params: &'a ScaledParams,
    meta: &'a ProfileMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    march: Option<nbarrier_core::waves::MarchDiagnostics>,
}

fn wave(
    model: &ModelArgs,
    solver: &SolverArgs,
    output: &OutputArgs,
    march: bool,
    mut hash: InputHash,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let r = inputs::resolve(model, None, Some(solver), &mut hash)?;
    let (prof, diag) = if march {
        let (prof, diag) = march_oracle(&r.params, &r.solver)?;
        (prof, Some(diag))
    } else {
        (solve_wave(&r.params, &r.solver)?, None)
    };
    let mut em = Emitter::new(output.out.clone(), stdout);
    if em.to_files() {
        let sidecar = Sidecar {
            theta: prof.theta,
            residual: prof.meta.residual,
            config_hash: config_hash(&r.params, &r.solver)?,
            params: &r.params,
            meta: &prof.meta,
            march: diag,
        };
        em.emit("profile.csv", &profile_csv(&prof)?)?;
        em.emit("profile.json", &json(&sidecar)?)?;
    } else {
        match output.format {
            Format::Json => em.emit("profile.json", &json(&prof)?)?,
            Format::Csv => em.emit("profile.csv", &profile_csv(&prof)?)?,
        }
    }
    say(
        stderr,
        format_args!(
            "{} wave: speed {} (residual {:e}, {} nodes)",
            prof.meta.method,
            prof.theta,
            prof.meta.residual,
            prof.grid.len()
        ),
    );
    em.finish("wave", &hash)
}

fn external_profile(path: &Path, p: &ScaledParams, hash: &mut InputHash) -> Result<WaveProfile, CliError> {
    let rows = inputs::profile_csv(path, hash)?;
    let meta = ProfileMeta {
        method: "external".into(),
        residual: f64::NAN,
        iterations: 0,
        eps_bc: SolverConfig::default().eps_bc,
        half_length: rows.last().map_or(0.0, |r| r.0),
        intervals: rows.len().saturating_sub(1),
        clipped: 0.0,
        continuation_steps: 0,
    };
    let (grid, (u, v)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = rows.into_iter().map(|(x, u, v)| (x, (u, v))).unzip();
    Ok(WaveProfile::new(grid, u, v, p.theta().unwrap_or(0.0), meta)?)
}

fn report_rows(report: &VerificationReport) -> Vec<Vec<String>> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    report
        .checks
        .iter()
        .map(|c| {
            let status = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::NotApplicable => "NOT_APPLICABLE",
            };
            vec![
                c.name.clone(),
                c.quantity.clone(),
                c.side.clone(),
                opt(c.bound),
                c.observed.to_string(),
                opt(c.margin),
                status.to_string(),
                c.note.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn verify(
    model: &ModelArgs,
    weights: &WeightArgs,
    solver: &SolverArgs,
    output: &OutputArgs,
    profile: Option<&Path>,
    mut hash: InputHash,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let r = inputs::resolve(model, Some(weights), Some(solver), &mut hash)?;
    let prof = match profile {
        Some(path) => external_profile(path, &r.params, &mut hash)?,
        None => solve_wave(&r.params, &r.solver)?,
    };
    let report = bound_verify(&prof, &r.params, &weights_of(&r))?;
    let mut em = Emitter::new(output.out.clone(), stdout);
    match output.format {
        Format::Json => em.emit("verification.json", &json(&report)?)?,
        Format::Csv => {
            let header = ["name", "quantity", "side", "bound", "observed", "margin", "status", "note"];
            em.emit("verification.csv", &csv_document(&header, &report_rows(&report))?)?
        }
    }
    for c in &report.checks {
        say(stderr, format_args!("{:<14} {:?} observed {}", c.name, c.status, c.observed));
    }
    em.finish("verify", &hash)?;
    if report.passed {
        Ok(())
    } else if !report.boundary_ok {
        Err(CliError::Domain("profile does not connect the expected end states".into()))
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Domain(format!("bound violated: {}", names.join(", "))))
    }
}

#[derive(Serialize)]
struct NonexistReport {
    params: ThreeSpeciesParams,
    #[serde(flatten)]
    verdict: ThreeSpeciesVerdict,
    /// Growth rates of the first two species with `w` at its supremum.
    reduced_rates: (f64, f64),
    /// Lower barrier bound of the reduced two-species system, when it exists.
    reduced_lower_bound: Option<f64>,
    scope: &'static str,
}

fn nonexist(
    config: &Path,
    require_certified: bool,
    output: &OutputArgs,
    mut hash: InputHash,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let p = inputs::three_species(config, &mut hash)?;
    let verdict = check(&p)?;
    let report = NonexistReport {
        params: p,
        verdict,
        reduced_rates: reduced_system_margin(&p, p.sigma3 / p.c33)?,
        reduced_lower_bound: reduced_lower_bound(&p).ok(),
        scope: SCOPE,
    };
    let mut em = Emitter::new(output.out.clone(), stdout);
    match output.format {
        Format::Json => em.emit("nonexist.json", &json(&report)?)?,
        Format::Csv => {
            let row = verdict.csv_record(0.0)[1..].to_vec();
            em.emit("nonexist.csv", &csv_document(&CSV_HEADER[1..], &[row])?)?
        }
    }
    say(
        stderr,
        format_args!(
            "{} (h1 {}, h2 {}, h3 {}); scope: {SCOPE}",
            verdict.verdict.as_str(),
            verdict.h1,
            verdict.h2,
            verdict.h3
        ),
    );
    em.finish("nonexist", &hash)?;
    if require_certified && !verdict.is_certified() {
        return Err(CliError::Domain("nonexistence not certified (INCONCLUSIVE)".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    #[serde(flatten)]
    verdict: ThreeSpeciesVerdict,
}

#[derive(Serialize)]
struct SweepReport {
    axis: String,
    rows: Vec<SweepRow>,
    scope: &'static str,
}

fn sweep_cmd(
    config: &Path,
    axis: &str,
    values: &[f64],
    output: &OutputArgs,
    mut hash: InputHash,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let base = inputs::three_species(config, &mut hash)?;
    let verdicts = sweep(&base, axis, values)?;
    let mut em = Emitter::new(output.out.clone(), stdout);
    match output.format {
        Format::Json => {
            let report = SweepReport {
                axis: axis.to_string(),
                rows: values
                    .iter()
                    .zip(&verdicts)
                    .map(|(&value, &verdict)| SweepRow { value, verdict })
                    .collect(),
                scope: SCOPE,
            };
            em.emit("sweep.json", &json(&report)?)?
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = values.iter().zip(&verdicts).map(|(&x, v)| v.csv_record(x)).collect();
            em.emit("sweep.csv", &csv_document(&CSV_HEADER, &rows)?)?
        }
    }
    let certified = verdicts.iter().filter(|v| v.is_certified()).count();
    say(stderr, format_args!("{axis}: {certified}/{} values certified", verdicts.len()));
    em.finish("sweep", &hash)
}

fn trajectory_from_csv(path: &Path, hash: &mut InputHash) -> Result<Vec<(f64, f64)>, CliError> {
    let rows = inputs::profile_csv(path, hash)?;
    if let Some(&(x, u, v)) = rows.iter().find(|(x, u, v)| !(x.is_finite() && u.is_finite() && v.is_finite())) {
        return Err(CliError::Usage(format!(
            "inconsistent profile {}: non-finite row ({x}, {u}, {v})",
            path.display()
        )));
    }
    Ok(rows.into_iter().map(|(_, u, v)| (u, v)).collect())
}

fn barrier_lines(b: &Barrier) -> Vec<LevelLine> {
    let [inner, outer, p] = b.segments();
    vec![
        LevelLine { kind: LineKind::Q, label: "lambda1", level: b.lambda1, segment: inner },
        LevelLine { kind: LineKind::Q, label: "lambda2", level: b.lambda2, segment: outer },
        LevelLine { kind: LineKind::P, label: "eta", level: b.eta, segment: p },
    ]
}

fn figure(r: &Resolved, which: Construction, trajectory: Vec<(f64, f64)>) -> Result<Figure, CliError> {
    let (p, w) = (r.params, weights_of(r));
    let (lines, marker, name) = match which {
        Construction::Lower => (barrier_lines(&lower_barrier_scaled(&p, &w)?), None, "lower barrier"),
        Construction::Upper => (barrier_lines(&upper_barrier_scaled(&p, &w)?), None, "upper barrier"),
        Construction::Tangent => {
            let t = solve_tangent(&p, &w)?;
            let [inner, outer, pl] = t.segments();
            let lines = vec![
                LevelLine { kind: LineKind::Q, label: "lambda1", level: t.lambda1, segment: inner },
                LevelLine { kind: LineKind::Q, label: "lambda2", level: t.lambda2, segment: outer },
                LevelLine { kind: LineKind::P, label: "eta", level: t.eta, segment: pl },
            ];
            (lines, Some((t.u_t, t.v_t)), "tangent construction")
        }
    };
    Ok(Figure {
        params: p,
        weights: w,
        title: format!(
            "a1 = {}, a2 = {}, d = {}, alpha = {}, beta = {} ({name})",
            p.a1(),
            p.a2(),
            p.d(),
            w.alpha,
            w.beta
        ),
        lines,
        trajectory,
        marker,
    })
}

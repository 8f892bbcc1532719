//! Turning flags and config files into validated parameter sets.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use nbarrier_core::{ScaledParams, SolverConfig, ThreeSpeciesParams, Weights};
use serde::Deserialize;

use crate::output::InputHash;
use crate::CliError;

pub const SEED_VAR: &str = "NBARRIER_SEED";

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// JSON file holding the parameters; excludes every inline parameter flag
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    /// Diffusion ratio d2/d1
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Growth-rate ratio sigma2/sigma1 [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Wave speed guess (never changes the bounds)
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct WeightArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct SolverArgs {
    /// Half-length of the computational domain [-L, L]
    #[arg(long = "L", value_name = "L", allow_negative_numbers = true)]
    pub half_length: Option<f64>,
    /// Number of grid intervals (even)
    #[arg(long = "N", value_name = "N")]
    pub intervals: Option<usize>,
    /// Newton residual tolerance
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Flat config file for the two-species commands. Keys that a command does
/// not use are ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    a1: Option<f64>,
    a2: Option<f64>,
    d: Option<f64>,
    k: Option<f64>,
    theta: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "L")]
    half_length: Option<f64>,
    #[serde(rename = "N")]
    intervals: Option<usize>,
    tol: Option<f64>,
}

pub struct Resolved {
    pub params: ScaledParams,
    pub weights: Option<Weights>,
    pub solver: SolverConfig,
}

pub fn read_file(path: &Path, hash: &mut InputHash) -> Result<Vec<u8>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    hash.update(&bytes);
    Ok(bytes)
}

fn parse_json<'a, T: Deserialize<'a>>(path: &Path, bytes: &'a [u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

fn required(name: &str, value: Option<f64>) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing parameter `{name}` (pass --{name} or --config)")))
}

pub fn resolve(
    model: &ModelArgs,
    weights: Option<&WeightArgs>,
    solver: Option<&SolverArgs>,
    hash: &mut InputHash,
) -> Result<Resolved, CliError> {
    let mut given = vec![model.a1, model.a2, model.d, model.k, model.theta];
    if let Some(w) = weights {
        given.extend([w.alpha, w.beta]);
    }
    if let Some(s) = solver {
        given.extend([s.half_length, s.tol, s.intervals.map(|n| n as f64)]);
    }
    let inline = given.iter().any(Option::is_some);

    let file = match &model.config {
        Some(path) => {
            if inline {
                return Err(CliError::Usage(
                    "--config cannot be combined with inline parameter flags".into(),
                ));
            }
            let bytes = read_file(path, hash)?;
            parse_json::<ConfigFile>(path, &bytes)?
        }
        None => ConfigFile {
            a1: model.a1,
            a2: model.a2,
            d: model.d,
            k: model.k,
            theta: model.theta,
            alpha: weights.and_then(|w| w.alpha),
            beta: weights.and_then(|w| w.beta),
            half_length: solver.and_then(|s| s.half_length),
            intervals: solver.and_then(|s| s.intervals),
            tol: solver.and_then(|s| s.tol),
        },
    };

    let mut params = ScaledParams::new(
        required("a1", file.a1)?,
        required("a2", file.a2)?,
        required("d", file.d)?,
        file.k.unwrap_or(1.0),
    )?;
    if let Some(theta) = file.theta {
        params = params.with_theta(theta)?;
    }
    let weights = match weights {
        Some(_) => Some(Weights::new(required("alpha", file.alpha)?, required("beta", file.beta)?)?),
        None => None,
    };

    let mut cfg = SolverConfig::default();
    if let Some(l) = file.half_length {
        cfg.half_length = l;
    }
    if let Some(n) = file.intervals {
        cfg.intervals = n;
    }
    if let Some(tol) = file.tol {
        cfg.tol = tol;
    }
    cfg.jitter_seed = seed_from_env()?;
    if solver.is_some() {
        cfg.validate()?;
    }
    Ok(Resolved {
        params,
        weights,
        solver: cfg,
    })
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(s) if s.is_empty() => Ok(None),
        Ok(s) => s
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_VAR} must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

pub fn three_species(path: &Path, hash: &mut InputHash) -> Result<ThreeSpeciesParams, CliError> {
    let bytes = read_file(path, hash)?;
    let p: ThreeSpeciesParams = parse_json(path, &bytes)?;
    p.validate()?;
    Ok(p)
}

/// Reads a profile CSV with header `x,u,v`.
pub fn profile_csv(path: &Path, hash: &mut InputHash) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let bytes = read_file(path, hash)?;
    let bad = |msg: String| CliError::Usage(format!("inconsistent profile {}: {msg}", path.display()));
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["x", "u", "v"] {
        return Err(bad(format!("expected header x,u,v, got {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record[i].trim().parse().map_err(|_| bad(format!("not a number: `{}`", &record[i])))
        };
        rows.push((field(0)?, field(1)?, field(2)?));
    }
    Ok(rows)
}

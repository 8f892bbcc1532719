//! Command-line front end for `nbarrier-core`.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns the
//! process exit code: 0 on success, 1 on domain errors (parameters outside
//! the bistable regime, outside the tangent window, an inconclusive verdict
//! under `--require-certified`, a failed verification, solver failure), 2 on
//! usage errors.

mod commands;
mod inputs;
mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use inputs::{ModelArgs, SolverArgs, WeightArgs};

pub use output::RunManifest;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Runtime(_) => 1,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) | CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<nbarrier_core::Error> for CliError {
    fn from(e: nbarrier_core::Error) -> Self {
        use nbarrier_core::Error::*;
        match e {
            InvalidParameter { .. } | InvalidConfig(_) | InvalidProfile(_) | UnknownAxis(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write files plus manifest.json into this directory instead of stdout
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Parser, Debug)]
#[command(name = "nbarrier", version, about = "A-priori bounds for Lotka-Volterra competition waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower and upper bounds on q = alpha u + d beta v
    Bounds {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sharper lower bound from the tangent line to F = 0
    Tangent {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute a traveling-wave profile
    Wave {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Use the time-marching oracle instead of Newton
        #[arg(long)]
        march: bool,
    },
    /// Check every bound along a computed (or supplied) profile
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Profile CSV (x,u,v) to check instead of solving
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
    },
    /// Three-species nonexistence criterion
    Nonexist {
        /// JSON file with d1..d3, sigma1..sigma3 and c11..c33
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Exit 1 unless nonexistence is certified
        #[arg(long)]
        require_certified: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Nonexistence verdicts along one parameter axis
    Sweep {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Field to vary, e.g. sigma3
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        values: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Phase-plane SVG with nullclines, conic and barrier lines
    Plot {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Which construction to draw
        #[arg(long, value_enum, default_value_t = commands::Construction::Lower)]
        barrier: commands::Construction,
        /// Overlay a computed wave
        #[arg(long, conflicts_with = "profile")]
        wave: bool,
        /// Overlay the trajectory from a profile CSV (x,u,v)
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
        /// Output directory (the figure goes to stdout otherwise)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

/// Runs the CLI on `args` (program name first), writing to the process's
/// stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    match commands::dispatch(cli.command, &args, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

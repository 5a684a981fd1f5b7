//! `tw`: generate CMC spheres in E(k, τ), evaluate the Willmore-like energy,
//! and run the verification suites.
//!
//! Exit codes: 0 success, 1 invalid configuration or input, 2 no CMC sphere
//! for the requested (k, τ, H), 3 I/O failure, 4 a verification check failed.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thurston_willmore::Error;

use commands::Suite;
use config::{expand_tolerance_flags, Format, Overrides, RunConfig};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ExistenceViolation { .. } => 2,
            Error::Io(_) => 3,
            Error::Csv(c) if c.is_io_error() => 3,
            Error::InvalidGeometry(_)
            | Error::InvalidNormalComponent { .. }
            | Error::InadmissiblePerturbation(_)
            | Error::OpenProfile(_)
            | Error::MalformedProfile(_)
            | Error::InvalidArgument(_)
            | Error::NotInterior { .. }
            | Error::Json(_)
            | Error::Csv(_) => 1,
            _ => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "tw",
    version,
    about = "CMC spheres and the Willmore-like energy in E(k, tau)"
)]
struct Cli {
    #[command(flatten)]
    options: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Options {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Mean curvature of the CMC sphere.
    #[arg(long = "H", global = true, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Energy coefficient alpha (default: canonical for the geometry).
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Energy coefficient beta (default: canonical for the geometry).
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Perturbation amplitude.
    #[arg(long, global = true, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Perturbation mode.
    #[arg(long, global = true)]
    mode: Option<u32>,
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Threshold override; `--tol-NAME VALUE` is accepted too.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    /// Number of modes in the descent family.
    #[arg(long, global = true)]
    family_dims: Option<usize>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a CMC sphere (or a perturbation of it with --epsilon/--mode).
    Generate,
    /// Evaluate the energy of a saved profile.
    Energy { profile: PathBuf },
    /// Write the Euler-Lagrange residual along a saved profile.
    Residual { profile: PathBuf },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Sweep a (k, tau, H) grid given as JSON (default: the acceptance grid).
    Sweep { spec: Option<PathBuf> },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let o = cli.options;
    let mut config = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply(&Overrides {
        k: o.k,
        tau: o.tau,
        h: o.h,
        alpha: o.alpha,
        beta: o.beta,
        epsilon: o.epsilon,
        mode: o.mode,
        out: o.out,
        format: o.format,
        tolerances: o.tol,
        family_dims: o.family_dims,
        sequential: o.sequential,
    })?;
    match cli.command {
        Command::Generate => commands::generate(config),
        Command::Energy { profile } => commands::energy_cmd(config, &profile),
        Command::Residual { profile } => commands::residual_cmd(config, &profile),
        Command::Verify { suite } => commands::verify(config, suite),
        Command::Sweep { spec } => commands::sweep_cmd(config, spec.as_deref()),
    }
}

fn main() -> ExitCode {
    let args = expand_tolerance_flags(std::env::args());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tw: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

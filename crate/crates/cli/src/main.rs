//! `prodgeom`: mean-curvature profiles, ODE solves, constant-angle scans,
//! verification reports and point samples for hypersurfaces of products of
//! space forms.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 config error, 3 domain or focal
//! error, 4 verification failure.

mod commands;
mod config;
mod error;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prodgeom::FdConfig;

use crate::commands::Output;
use crate::config::{override_tolerance, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "prodgeom", version, about = "Hypersurfaces of products of space forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean-curvature profile of each factor's parallel family, as CSV
    Profile(WithConfig),
    /// Integrate the constant-mean-curvature ODE, as CSV
    Solve(WithConfig),
    /// Find constant angles that solve the mean-curvature equation, as JSON
    Scan {
        #[command(flatten)]
        io: WithConfig,
        /// Number of cell-centred angles in [0, 2 pi)
        #[arg(long, default_value_t = 2000)]
        theta_grid: usize,
    },
    /// Run the finite-difference verification suite, as JSON
    Verify(WithConfig),
    /// Sample the immersion on a chart grid, as CSV
    Sample(WithConfig),
    /// Run the built-in catalog end to end, as JSON
    Examples {
        #[command(flatten)]
        common: Common,
        /// Verification points per example
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

#[derive(Args)]
struct WithConfig {
    /// JSON run configuration; stdin when omitted or `-`
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override one tolerance, e.g. `tol_geometry=1e-5`; repeatable
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
    /// Print the output columns and exit
    #[arg(long)]
    schema: bool,
}

impl Common {
    fn tolerances(&self, base: FdConfig) -> Result<FdConfig, CliError> {
        self.tolerances
            .iter()
            .try_fold(base, |cfg, a| override_tolerance(&cfg, a))
    }
}

fn load(io: &WithConfig) -> Result<RunConfig, CliError> {
    let text = match io.config.as_deref() {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(seed) = io.common.seed {
        cfg.seed = seed;
    }
    cfg.tolerances = io.common.tolerances(cfg.tolerances)?;
    Ok(cfg)
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            // a closed reader (`| head`) is not a failure
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (name, common) = match &cli.command {
        Command::Profile(io) => ("profile", &io.common),
        Command::Solve(io) => ("solve", &io.common),
        Command::Scan { io, .. } => ("scan", &io.common),
        Command::Verify(io) => ("verify", &io.common),
        Command::Sample(io) => ("sample", &io.common),
        Command::Examples { common, .. } => ("examples", common),
    };
    if common.schema {
        emit(common.out.as_ref(), commands::schema(name))?;
        return Ok(0);
    }
    let Output { body, code } = match &cli.command {
        Command::Profile(io) => commands::profile(&load(io)?)?,
        Command::Solve(io) => commands::solve(&load(io)?)?,
        Command::Scan { io, theta_grid } => commands::scan(&load(io)?, *theta_grid)?,
        Command::Verify(io) => commands::verify(&load(io)?)?,
        Command::Sample(io) => commands::sample(&load(io)?)?,
        Command::Examples { common, points } => {
            if *points == 0 {
                return Err(CliError::Config("--points must be positive".into()));
            }
            let tol = common.tolerances(FdConfig::default())?;
            commands::examples(common.seed.unwrap_or(0), *points, &tol)?
        }
    };
    emit(common.out.as_ref(), &body)?;
    if code == 4 {
        eprintln!("prodgeom: {}", CliError::Verification(format!("{name} reported failures")));
    }
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("prodgeom: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `slag`: solve, verify, sample and inspect torus-invariant special
//! Lagrangian n-folds from a TOML run configuration.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 no
//! convergence, 3 singular parameters, 4 verification failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use slag_core::Error;

#[derive(Parser)]
#[command(name = "slag", version, about = "Torus-invariant special Lagrangian n-folds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Dirichlet problem and write fields and a run report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Torus samples per circle for embedding outputs.
        #[arg(long, default_value_t = 8)]
        torus_res: usize,
        /// Three coordinates for VTK point clouds, e.g. re:z3,im:z3,re:z1.
        #[arg(long)]
        project: Option<String>,
    },
    /// Check first-order, ω, Im Ω and decomposition residuals of u, v fields.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// CSV with u and v columns.
        #[arg(long)]
        fields: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Tabulate the affine, Harvey-Lawson type or n = 3 families.
    Example {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Lift u, v fields (or a fresh solve) to points of ℂⁿ.
    Embed {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        fields: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 8)]
        torus_res: usize,
        #[arg(long)]
        project: Option<String>,
    },
    /// Winding number of the difference of two solutions around a circle.
    Wind {
        /// Two CSV files with u and v columns on the same grid.
        #[arg(long, num_args = 2, required = true)]
        fields: Vec<PathBuf>,
        /// Circle centre as x,y.
        #[arg(long, value_parser = parse_point)]
        center: (f64, f64),
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_point(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("expected x,y"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { config, out, torus_res, project } => {
            commands::solve(&config, &out, torus_res, project.as_deref())
        }
        Command::Verify { config, fields, out } => commands::verify(&config, &fields, &out),
        Command::Example { config, out } => commands::example(&config, &out),
        Command::Embed { config, fields, out, torus_res, project } => {
            commands::embed(&config, fields.as_deref(), &out, torus_res, project.as_deref())
        }
        Command::Wind { fields, center, radius, samples, out } => {
            commands::wind(&fields[0], &fields[1], center, radius, samples, &out)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::NoConvergence { .. }) => 2,
        Some(Error::SingularParameters(_) | Error::DegeneracyEncountered { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

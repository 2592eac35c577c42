//! `fokas`: command-line front end for the half-line unified-transform
//! pipeline. Reports are `key=value` lines on stdout, also saved as
//! `<out_dir>/<command>.report`.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 input error,
//! 3 numerical failure.

mod commands;
mod config;
mod residues;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fokas_core::{write_atomic, Error, Severity};

use commands::{Outcome, SolveGrid};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "fokas", version, about = "Unified-transform toolkit for the complex Sharma-Tasso-Olver initial-boundary value problem, x >= 0")]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable, applied after the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral functions a, b of an initial profile.
    Scatter {
        u0: PathBuf,
        /// Treat the profile as piecewise constant and compare with the
        /// transfer-matrix product.
        #[arg(long)]
        oracle_check: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spectral functions A, B of boundary profiles g0, g1, g2.
    BoundaryScatter {
        g0: PathBuf,
        g1: PathBuf,
        g2: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Invariant suites over one table or an (a, b) and (A, B) pair.
    Validate {
        #[arg(required = true, num_args = 1..=2)]
        tables: Vec<PathBuf>,
    },
    /// Zeros of a, alpha and A, with residue data for the solver.
    Zeros {
        #[arg(long)]
        initial: Option<PathBuf>,
        /// g0 g1 g2
        #[arg(long, num_args = 3, value_names = ["G0", "G1", "G2"])]
        boundary: Vec<PathBuf>,
    },
    /// Riemann-Hilbert solves on a grid and reconstruction of u.
    Solve {
        #[arg(required = true, num_args = 1..=2)]
        tables: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        hx: f64,
        #[arg(long, default_value_t = 1)]
        nx: usize,
        #[arg(long, default_value_t = 0.1)]
        hy: f64,
        #[arg(long, default_value_t = 1)]
        ny: usize,
        /// Pole data as written by `zeros`.
        #[arg(long, value_name = "FILE")]
        fixture_residues: Option<PathBuf>,
    },
    /// Direct evolution of the equation from an initial profile.
    Oracle {
        #[arg(required_unless_present = "manufactured")]
        u0: Option<PathBuf>,
        /// Convergence table against a manufactured solution instead.
        #[arg(long, conflicts_with = "u0")]
        manufactured: bool,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Boundary traces and corner report of a stored field.
    Traces { field: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Scatter { .. } => "scatter",
            Command::BoundaryScatter { .. } => "boundary-scatter",
            Command::Validate { .. } => "validate",
            Command::Zeros { .. } => "zeros",
            Command::Solve { .. } => "solve",
            Command::Oracle { .. } => "oracle",
            Command::Traces { .. } => "traces",
        }
    }
}

fn run(cli: &Cli) -> fokas_core::Result<Outcome> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io {
        path: cfg.out_dir.display().to_string(),
        source: e,
    })?;
    let out = match &cli.command {
        Command::Scatter { u0, oracle_check, output } => commands::scatter(&cfg, u0, *oracle_check, output.as_deref()),
        Command::BoundaryScatter { g0, g1, g2, output } => {
            commands::boundary_scatter(&cfg, &[g0.clone(), g1.clone(), g2.clone()], output.as_deref())
        }
        Command::Validate { tables } => commands::validate(&cfg, tables),
        Command::Zeros { initial, boundary } => commands::zeros(&cfg, initial.as_deref(), boundary),
        Command::Solve { tables, hx, nx, hy, ny, fixture_residues } => {
            let grid = SolveGrid { hx: *hx, nx: *nx, hy: *hy, ny: *ny };
            commands::solve(&cfg, tables, &grid, fixture_residues.as_deref())
        }
        Command::Oracle { manufactured: true, levels, .. } => commands::oracle_manufactured(&cfg, *levels),
        Command::Oracle { u0, .. } => commands::oracle(&cfg, u0.as_deref().expect("clap requires u0")),
        Command::Traces { field } => commands::traces(&cfg, field),
    }?;
    let path = cfg.out_dir.join(format!("{}.report", cli.command.name()));
    write_atomic(&path, &out.report.to_string())?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.report);
            ExitCode::from(if out.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.severity() {
                Severity::Input => 2,
                Severity::Numerical => 3,
            })
        }
    }
}

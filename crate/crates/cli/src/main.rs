//! `carleman`: build, decompose, encode, cost and solve the Carleman-linearized
//! Burgers system from a TOML configuration.
//!
//! Exit codes: 0 on success, 1 when a verification or comparison fails (or a
//! run errors), 2 for configuration and usage errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(carleman_core::Error),
}

impl From<carleman_core::Error> for CliError {
    fn from(e: carleman_core::Error) -> Self {
        match e {
            carleman_core::Error::InvalidConfig(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "carleman", version, about = "Carleman-linearized Burgers' equation toolkit")]
struct Cli {
    /// TOML configuration; built-in desk-scale defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration value, e.g. `--set n_x=8` or `--set vqls.layers=4`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// VQLS parameter seed (overrides `vqls.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build L and L^(e) and report their sizes.
    Build {
        /// Also write the nonzeros of L^(e) as CSV (small systems only).
        #[arg(long)]
        dump_matrix: bool,
    },
    /// Decompose L^(e) into tensor-product terms and report the counts.
    Decompose {
        /// Check that the terms sum back to L^(e).
        #[arg(long)]
        verify: bool,
    },
    /// Block encode every term (or one term) as a gate list.
    Encode {
        /// Realize each encoding and check unitarity and the encoded block.
        #[arg(long)]
        verify: bool,
        /// Encode only the term with this index.
        #[arg(long, value_name = "ID")]
        term: Option<usize>,
    },
    /// Clifford and T counts per term, or a scaling sweep.
    Resources {
        /// Sweep specification, e.g. `n_x=4..64;n_t=n_x;alpha=2`.
        #[arg(long, value_name = "SWEEP")]
        sweep: Option<String>,
    },
    /// Classical solve plus VQLS, with trajectory output.
    Solve {
        /// Skip the variational solve.
        #[arg(long)]
        classical_only: bool,
    },
    /// Compare a stored VQLS state against the classical solution.
    Compare {
        /// Solution file written by `solve` (default: `<out>/solution.json`).
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    if let Some(seed) = cli.seed {
        cfg.vqls.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    let out = cfg.output.dir.clone();
    match cli.command {
        Command::Build { dump_matrix } => commands::build(&cfg, &out, dump_matrix),
        Command::Decompose { verify } => commands::decompose(&cfg, &out, verify),
        Command::Encode { verify, term } => commands::encode(&cfg, &out, verify, term),
        Command::Resources { sweep } => commands::resources(&cfg, &out, sweep.as_deref()),
        Command::Solve { classical_only } => commands::solve(&cfg, &out, classical_only),
        Command::Compare { input } => commands::compare(&cfg, &out, input.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

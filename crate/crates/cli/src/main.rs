#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Invocation;
use crate::config::RunConfig;
use crate::error::CliError;

/// Relativistic wavepacket evolution and light-cone leakage runs.
#[derive(Debug, Parser)]
#[command(name = "lightcone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density snapshots (or one heatmap file) at the configured times.
    Evolve(Common),
    /// Fraction of probability outside the light cone over time.
    Fraction(Common),
    /// Peak or threshold table over a set of wavepackets.
    Table(Common),
    /// Propagator lattice, both evaluation paths, and decay-rate sweep.
    Kernel(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Include long-running table cells (rectangular threshold cells).
    #[arg(long)]
    long_running: bool,
    /// Worker threads; affects speed only.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common) = match &cli.command {
        Command::Evolve(c) => ("evolve", c),
        Command::Fraction(c) => ("fraction", c),
        Command::Table(c) => ("table", c),
        Command::Kernel(c) => ("kernel", c),
    };
    let config = RunConfig::load(&common.config)?;
    let out = common
        .out
        .clone()
        .or_else(|| config.out.clone())
        .ok_or_else(|| CliError::config("out", "no output directory: pass --out or set `out`"))?;
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::config("threads", e))?;
    }
    let inv = Invocation {
        command: name,
        long_running: common.long_running,
        threads: rayon::current_num_threads(),
    };
    let (artifacts, failed) = match cli.command {
        Command::Evolve(_) => (commands::evolve(&config, inv)?, 0),
        Command::Fraction(_) => (commands::fraction(&config, inv)?, 0),
        Command::Table(_) => commands::table(&config, inv)?,
        Command::Kernel(_) => (commands::kernel(&config, inv)?, 0),
    };
    for path in output::commit(&out, &artifacts)? {
        println!("{}", path.display());
    }
    if failed > 0 {
        return Err(CliError::CellsFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lightcone: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

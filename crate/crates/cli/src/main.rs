use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use commands::Context;
use config::{Preset, SimConfig};
use error::CliError;

/// Simulate paired quantum walks for the Dirac equation in curved (1+1) spacetime.
#[derive(Debug, Parser)]
#[command(name = "pairwalk", version, about)]
struct Cli {
    /// TOML configuration layered over the preset.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the operators and certificates at one point.
    Synthesize {
        #[arg(long, num_args = 2, value_names = ["T", "X"], allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// Evolve the configured wavepacket and write snapshots.
    Simulate,
    /// Compare the walk against the PDE reference for several lattice spacings.
    Converge {
        #[arg(long, num_args = 1.., required = true)]
        eps: Vec<f64>,
    },
    /// Run the certificate, unitarity and causality checks on the configured lattice.
    Check,
    /// Integrate null geodesics from the given seeds.
    Geodesics {
        /// Seed positions; defaults to `geodesics.seeds`.
        #[arg(long, num_args = 0.., allow_negative_numbers = true)]
        seeds: Option<Vec<f64>>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let config = SimConfig::load(cli.config.as_deref(), cli.preset)?;
    let out = cli.out.unwrap_or_else(|| config.output.dir.clone());
    let ctx = Context { config, out };
    match cli.command {
        Command::Synthesize { at } => commands::synthesize::run(&ctx, at[0], at[1]),
        Command::Simulate => commands::simulate::run(&ctx),
        Command::Converge { eps } => commands::converge::run(&ctx, &eps),
        Command::Check => commands::check::run(&ctx),
        Command::Geodesics { seeds } => {
            let seeds = seeds.unwrap_or_else(|| ctx.config.geodesics.seeds.clone());
            commands::geodesics::run(&ctx, &seeds)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pairwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

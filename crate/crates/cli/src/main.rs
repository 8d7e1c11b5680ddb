//! `kl`: experiment runner for Kraus-map control landscapes.
//!
//! Exit codes: 0 when every check passes, 1 when a scientific check fails,
//! 2 on usage, schema or I/O errors.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "kl", version, about = "Kraus-map landscape experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config; built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "KL_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Validate Kraus maps and measurements (supplied or randomly sampled).
    Validate,
    /// Multi-start gradient ascent; passes iff every start reaches λ_max.
    Sweep,
    /// Monte Carlo feedback trajectories against the averaged Kraus map.
    Rtfc,
    /// Coherent-feedback Kraus maps against the partial-trace route.
    Coherent,
    /// The universal optimal map for an observable.
    Universal,
}

/// Global flags shared by every command.
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let inv = Invocation {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
    };
    match cli.command {
        Command::Validate => commands::validate::run(&inv),
        Command::Sweep => commands::sweep::run(&inv),
        Command::Rtfc => commands::rtfc::run(&inv),
        Command::Coherent => commands::coherent::run(&inv),
        Command::Universal => commands::universal::run(&inv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

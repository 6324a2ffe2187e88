//! `wectkit` command-line front end.

mod commands;
mod config;

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "wectkit",
    version,
    about = "Weighted Euler characteristic transforms of grayscale images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded dataset of image CSVs plus manifest.json.
    Generate(RunConfig),
    /// Transform one image: wect.json, vector.csv and its vector.json header.
    Wect(RunConfig),
    /// Closed-form expected curve (optionally with a sampled mean and std).
    Expect(RunConfig),
    /// Pairwise WECT distance matrix.
    Distance(RunConfig),
    /// Classification experiments, one results.csv row per run.
    Experiment(RunConfig),
    /// Accuracy against the number of directions.
    Sweep(RunConfig),
}

#[derive(Args)]
pub struct RunConfig {
    /// JSON configuration of the subcommand.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Master seed; overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, env = "WECTKIT_THREADS")]
    pub threads: Option<NonZeroUsize>,
}

fn run(cli: Cli) -> Result<()> {
    let (Command::Generate(rc)
    | Command::Wect(rc)
    | Command::Expect(rc)
    | Command::Distance(rc)
    | Command::Experiment(rc)
    | Command::Sweep(rc)) = &cli.command;
    if let Some(t) = rc.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.get())
            .build_global()
            .context("configuring the thread pool")?;
    }
    std::fs::create_dir_all(&rc.out).with_context(|| format!("creating {}", rc.out.display()))?;
    match &cli.command {
        Command::Generate(rc) => commands::generate(rc),
        Command::Wect(rc) => commands::wect(rc),
        Command::Expect(rc) => commands::expect(rc),
        Command::Distance(rc) => commands::distance(rc),
        Command::Experiment(rc) => commands::experiment(rc),
        Command::Sweep(rc) => commands::sweep(rc),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<config::SchemaError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

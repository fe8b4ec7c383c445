//! Command-line front end: argument parsing and the subcommands.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use unioncs::Execution;

pub use commands::RunContext;
use config::Override;

#[derive(Debug, Parser)]
#[command(name = "unioncs", version, about = "Compressive sensing with a union-of-convex-sets prior")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// More log output; repeat for debug.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Only errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem instance.
    Solve(Common),
    /// Run a recovery experiment over a grid of measurement counts.
    Experiment(Common),
    /// Evaluate the uniqueness probability bounds and minimal M.
    Bounds(Common),
    /// Estimate Gaussian widths of window families.
    Width(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Override a config field, e.g. `--set solver.horizon=500`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Replaces the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Cli {
    pub fn log_level(&self) -> log::LevelFilter {
        match (self.quiet, self.verbose) {
            (true, _) => log::LevelFilter::Error,
            (false, 0) => log::LevelFilter::Warn,
            (false, 1) => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        }
    }
}

fn execution(threads: Option<usize>) -> anyhow::Result<Execution> {
    match threads {
        Some(0) => anyhow::bail!(config::ConfigError("--threads must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            configure_pool(n)?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

#[cfg(feature = "parallel")]
fn configure_pool(n: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_pool(n: usize) -> anyhow::Result<()> {
    log::warn!("built without the parallel feature; ignoring --threads {n}");
    Ok(())
}

/// Runs the parsed command and returns the process exit status: 0 on
/// success, 1 when an experiment assertion fails, 2 on any error.
pub fn run(cli: Cli) -> i32 {
    let (common, cmd): (&Common, fn(&RunContext) -> anyhow::Result<i32>) = match &cli.command {
        Command::Solve(c) => (c, commands::solve_cmd),
        Command::Experiment(c) => (c, commands::experiment_cmd),
        Command::Bounds(c) => (c, commands::bounds_cmd),
        Command::Width(c) => (c, commands::width_cmd),
    };
    let ctx = common
        .overrides
        .iter()
        .map(|o| Override::parse(o))
        .collect::<anyhow::Result<Vec<_>>>()
        .and_then(|overrides| {
            Ok(RunContext {
                config: common.config.clone(),
                out: common.out.clone(),
                overrides,
                seed: common.seed,
                exec: execution(common.threads)?,
            })
        });
    match ctx.and_then(|ctx| cmd(&ctx)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

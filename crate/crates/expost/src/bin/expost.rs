//! Command-line front end: runs one experiment config per invocation.
//!
//! Exit codes: 0 on a clean run, 1 when a verification-style task found
//! violations, 2 on configuration or usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use expost::config::ExperimentConfig;
use expost::runner::run_experiment;

#[derive(Parser)]
#[command(
    name = "expost",
    about = "Verify, synthesize, and optimize ex-post implementable auctions on signal grids",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory for result files (created if missing).
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a mechanism's monotonicity, incentive, and participation
    /// constraints.
    Verify(RunArgs),
    /// Build incentive compatible payments for an allocation table.
    Synthesize(RunArgs),
    /// Construct a revenue-maximizing mechanism.
    Optimize(RunArgs),
    /// Estimate and compare expected revenue across mechanisms.
    Revenue(RunArgs),
    /// Posted-price benchmark against must-sell equal shares.
    Benchmark(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Synthesize(_) => "synthesize",
            Command::Optimize(_) => "optimize",
            Command::Revenue(_) => "revenue",
            Command::Benchmark(_) => "benchmark",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Verify(a)
            | Command::Synthesize(a)
            | Command::Optimize(a)
            | Command::Revenue(a)
            | Command::Benchmark(a) => a,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let args = cli.command.args();

    let config = match ExperimentConfig::load(&args.config) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if config.task.kind_name() != cli.command.name() {
        eprintln!(
            "error: config task is `{}` but the `{}` subcommand was invoked",
            config.task.kind_name(),
            cli.command.name()
        );
        return ExitCode::from(2);
    }

    let base_dir = args
        .config
        .parent()
        .unwrap_or_else(|| std::path::Path::new("."));
    match run_experiment(&config, base_dir, &args.out, args.seed) {
        Ok(outcome) => {
            if outcome.violations_found {
                eprintln!(
                    "{}: violations found; see {}",
                    outcome.task,
                    args.out.display()
                );
                ExitCode::from(1)
            } else {
                println!("{}: ok; wrote {}", outcome.task, outcome.files.join(", "));
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

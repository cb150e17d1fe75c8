//! Command-line runner for coated-inclusion experiments.
//!
//! Exit codes: 0 all checks pass, 1 a check fails, 2 bad configuration,
//! 3 solver failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::{Context, Outcome};
use thinlayer::config::Task;

#[derive(Parser)]
#[command(name = "thinlayer", version, about = "Coated inclusion solver and thin-layer asymptotics")]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and summary output; overrides the config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Node count on the inclusion boundary; overrides the config.
    #[arg(long, global = true)]
    n_nodes: Option<usize>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the coated problem at the configured ε and evaluate at the probes.
    Solve,
    /// Pointwise errors of the zeroth- and first-order fields along the ε ladder.
    CertifyThm11,
    /// Boundary measurement remainder along the ε ladder.
    CertifyThm12,
    /// Layer potential limits from two-sided probes.
    CheckJumps,
    /// Interface identities, integration by parts and reciprocity.
    CheckIdentities,
    /// Coated disk against the closed-form radial solution.
    OracleCompare,
    /// Every task listed in the configuration, in order.
    Run,
}

impl Command {
    fn task(&self) -> Option<Task> {
        Some(match self {
            Command::Solve => Task::Solve,
            Command::CertifyThm11 => Task::CertifyThm11,
            Command::CertifyThm12 => Task::CertifyThm12,
            Command::CheckJumps => Task::CheckJumps,
            Command::CheckIdentities => Task::CheckIdentities,
            Command::OracleCompare => Task::OracleCompare,
            Command::Run => return None,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let ctx = match Context::load(cli.config.as_deref(), cli.out_dir.as_deref(), cli.n_nodes, cli.quiet) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let tasks = match cli.command.task() {
        Some(t) => vec![t],
        None if ctx.config.tasks.is_empty() => {
            eprintln!("error: config field `tasks`: `run` needs at least one task");
            return ExitCode::from(2);
        }
        None => ctx.config.tasks.clone(),
    };
    let mut worst = Outcome::Pass;
    for task in tasks {
        match commands::execute(&ctx, task) {
            Ok(o) => worst = worst.max(o),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.code());
            }
        }
    }
    ExitCode::from(worst as u8)
}

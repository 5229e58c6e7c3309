//! Command-line front end for the transship planning library.

pub mod commands;
pub mod error;
pub mod format;
pub mod scenario;

use std::io::Write;

use clap::{Parser, Subcommand};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "transship", version, about = "Robust production and transshipment planning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the plan, regime, thresholds and worst-case profits.
    Policy(commands::PolicyArgs),
    /// Recompute the plan over a one-parameter sweep and write CSV.
    Sweep(commands::SweepArgs),
    /// Compare closed forms against the moment-LP oracle.
    Verify(commands::VerifyArgs),
    /// Sampled-distribution comparison with the complete-information plan.
    Robustness(commands::RobustnessArgs),
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Policy(a) => commands::cmd_policy(a, stdout),
        Command::Sweep(a) => commands::cmd_sweep(a, stdout),
        Command::Verify(a) => commands::cmd_verify(a, stdout),
        Command::Robustness(a) => commands::cmd_robustness(a, stdout),
    }
}

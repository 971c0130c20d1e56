//! Experiment runner around `fractoback-core`: forward solves, backward
//! reconstructions, instability and stability studies, and validation
//! checks, all emitting plot-ready CSV plus a JSON summary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod report;

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "fractoback",
    version,
    about = "Forward and backward problems of multi-term time-fractional diffusion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the multi-order kernel function at given arguments
    MlfEval(commands::MlfEvalArgs),
    /// Solve the initial-value problem and record trajectory norms
    Forward(commands::ForwardArgs),
    /// Reconstruct the initial state from final-time data
    Backward(commands::BackwardArgs),
    /// Forward solve, reconstruct, and gate both error measures
    Roundtrip(commands::RoundtripArgs),
    /// Sweep single-mode data to exhibit the inversion blow-up
    IllposedDemo(commands::IllposedArgs),
    /// Stability quotients over a random family inside the a-priori ball
    ConditionalStability(commands::StabilityArgs),
    /// Pin the numerics against independent references
    Validate(commands::ValidateArgs),
    /// List initial-data and source presets
    ListPresets,
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::MlfEval(args) => commands::run_mlf_eval(args),
        Command::Forward(args) => commands::run_forward(args),
        Command::Backward(args) => commands::run_backward(args),
        Command::Roundtrip(args) => commands::run_roundtrip(args),
        Command::IllposedDemo(args) => commands::run_illposed(args),
        Command::ConditionalStability(args) => commands::run_stability(args),
        Command::Validate(args) => commands::run_validate(args),
        Command::ListPresets => commands::run_list_presets(),
    }
}

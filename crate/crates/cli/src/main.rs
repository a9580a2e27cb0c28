//! `brlab`: command-line front end for the bounded remainder set toolkit.

mod alpha;
mod brf;
mod cf;
mod exp;
mod flow;
mod geom;
mod manifest;
mod tier;

use std::path::PathBuf;
use std::process::ExitCode;

use brlab::Error;
use clap::{Args, Parser, Subcommand};

use crate::manifest::Run;

#[derive(Debug, Parser)]
#[command(
    name = "brlab",
    version,
    about = "Bounded remainder sets for the continuous irrational rotation"
)]
struct Cli {
    /// Directory that receives one sub-directory per command.
    #[arg(long, global = true, default_value = "brlab-runs")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Continued fractions and Ostrowski expansions.
    #[command(subcommand)]
    Cf(cf::CfCommand),
    /// Set geometry and τ profiles.
    #[command(subcommand)]
    Geom(geom::GeomCommand),
    /// Birkhoff sums of profile functions.
    #[command(subcommand)]
    Brf(brf::BrfCommand),
    /// Flow discrepancy.
    #[command(subcommand)]
    Flow(flow::FlowCommand),
    /// Experiment recipes.
    Exp(exp::ExpArgs),
}

/// Shared `--seed` flag.
#[derive(Debug, Clone, Args)]
pub struct SeedArg {
    #[arg(long, default_value_t = brlab::experiments::DEFAULT_SEED)]
    pub seed: u64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precision { .. } => 3,
        Error::InternalConsistency(_) => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let name = match &cli.command {
        Command::Cf(c) => format!("cf {}", c.name()),
        Command::Geom(c) => format!("geom {}", c.name()),
        Command::Brf(c) => format!("brf {}", c.name()),
        Command::Flow(c) => format!("flow {}", c.name()),
        Command::Exp(e) => format!("exp {}", e.recipe.name()),
    };
    let mut run = Run::new(&cli.out_dir, &name, argv[1..].to_vec());
    let outcome = match &cli.command {
        Command::Cf(c) => cf::run(c, &mut run),
        Command::Geom(c) => geom::run(c, &mut run),
        Command::Brf(c) => brf::run(c, &mut run),
        Command::Flow(c) => flow::run(c, &mut run),
        Command::Exp(e) => exp::run(e, &mut run),
    };
    let failed_report = matches!(outcome, Ok(false));
    let outcome = outcome.map(|_| ());
    if let Err(e) = run.finish(&outcome) {
        eprintln!("brlab: could not write manifest: {e}");
    }
    match outcome {
        Err(e) => {
            eprintln!("brlab: {e}");
            ExitCode::from(exit_code(&e))
        }
        Ok(()) if failed_report => ExitCode::from(1),
        Ok(()) => ExitCode::SUCCESS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), 2);
        assert_eq!(exit_code(&Error::UnsupportedMode("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Precision {
                reason: "x".into(),
                last_trusted: 1
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::InternalConsistency("gap 5 > 4".into())),
            4
        );
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

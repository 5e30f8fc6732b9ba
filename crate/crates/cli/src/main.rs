//! `papangelou verify | sample | oracle <config>`.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! malformed config or an invalid model.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Parser)]
#[command(name = "papangelou", version, about = "Verify moment identities of point processes")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "PAPANGELOU_OUT", default_value = "papangelou-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a config; writes a CSV summary and a JSON detail.
    Verify {
        config: PathBuf,
        /// Run independent checks on this many threads.
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
    },
    /// Draw the configured sample batch.
    Sample { config: PathBuf },
    /// Dump the exact law of a discrete model.
    Oracle { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { config, parallel } => ExperimentConfig::load(config)
            .and_then(|c| run::verify(&c, &cli.out, *parallel))
            .map(|outcome| {
                for r in outcome.reports.iter().filter(|r| !r.pass) {
                    eprintln!(
                        "FAIL {}: lhs {} rhs {} {}",
                        r.identity,
                        r.lhs.value,
                        r.rhs.value,
                        r.notes.join("; ")
                    );
                }
                println!("{}\n{}", outcome.summary.display(), outcome.detail.display());
                outcome.all_pass()
            }),
        Command::Sample { config } => ExperimentConfig::load(config)
            .and_then(|c| run::sample(&c, &cli.out))
            .map(|p| {
                println!("{}", p.display());
                true
            }),
        Command::Oracle { config } => ExperimentConfig::load(config)
            .and_then(|c| run::oracle(&c, &cli.out))
            .map(|p| {
                println!("{}", p.display());
                true
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

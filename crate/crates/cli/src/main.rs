//! `driftbench`: synthesize drifting streams, evaluate learners on them and
//! export plot-ready metric series.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod report;
mod run;
mod synthesize;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "driftbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compose an abrupt, gradual or incremental drift stream from a dataset.
    Synthesize(synthesize::Args),
    /// Evaluate a learner (and optional prediction interval) test-then-train.
    Run(run::Args),
    /// Merge metrics files into one long-format CSV.
    Report(report::Args),
}

/// Invalid flag values or combinations, reported with exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Writes `value` as pretty JSON to `path` when one is given.
pub fn write_config(path: Option<&Path>, value: &serde_json::Value) -> anyhow::Result<()> {
    if let Some(p) = path {
        driftbench::manifest::write_json(p, value)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Synthesize(a) => synthesize::execute(a),
        Command::Run(a) => run::execute(a),
        Command::Report(a) => report::execute(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Library side of the `replicator` command-line tool: flag definitions,
//! command implementations, CSV schemas and the JSON output record.

pub mod args;
pub mod commands;
pub mod csv_io;
pub mod error;
pub mod record;

pub use error::{CliError, Result};
pub use record::OutputRecord;

use args::{Cli, Command};
use commands::Outcome;

/// Runs a parsed command. The caller decides how to print the outcome.
pub fn run(cli: &Cli) -> Result<(Outcome, bool)> {
    match &cli.command {
        Command::Thresholds(a) => commands::cmd_thresholds(a).map(|o| (o, a.json)),
        Command::Analyze(a) => commands::cmd_analyze(a).map(|o| (o, a.json)),
        Command::Sweep(a) => commands::cmd_sweep(a).map(|o| (o, a.json)),
        Command::Simulate(a) => commands::cmd_simulate(a).map(|o| (o, a.json)),
    }
}

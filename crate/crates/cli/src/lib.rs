//! Experiment runner for the `ordered-ridge` crate.
//!
//! Every subcommand writes its outputs plus a `<command>.manifest.json`
//! recording the resolved configuration, seeds, the input fingerprint and
//! output checksums. Failures print a JSON error object on stderr and exit
//! nonzero; a fit that stops at `max_iter` is still a success.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli, argv: &[String]) -> CliResult<()> {
    match &cli.command {
        Command::Synth(a) => commands::basic::cmd_synth(a, argv),
        Command::Lambda(a) => commands::basic::cmd_lambda(a, argv),
        Command::Fit(a) => commands::fit::cmd_fit(a, argv),
        Command::Eval(a) => commands::basic::cmd_eval(a, argv),
        Command::Sweep(a) => commands::sweep::cmd_sweep(a, argv),
        Command::Replay(a) => commands::cmd_replay(a),
    }
}

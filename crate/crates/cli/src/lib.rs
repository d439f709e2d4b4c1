//! Command-line front end for `bintomo`: phantom generation, projection,
//! reconstruction, enumeration checks and benchmark sweeps.
//!
//! The binary is a thin wrapper around [`run`]; the pipeline and suite
//! modules are public so that tests can drive them without a subprocess.

pub mod args;
pub mod commands;
pub mod config;
pub mod failure;
pub mod files;
pub mod pipeline;
pub mod suite;

use clap::Parser;

use args::{Cli, Command};
use failure::Failure;

/// Parses `argv` (with config-file defaults merged in) and runs the
/// selected subcommand.
pub fn run(argv: Vec<String>) -> Result<(), Failure> {
    let argv = config::merge_config(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Usage(e.render().to_string())),
    };
    match cli.command {
        Command::Phantom(a) => commands::phantom::run(&a),
        Command::Project(a) => commands::project::run(&a),
        Command::Reconstruct(a) => commands::reconstruct::run(&a),
        Command::Enumerate(a) => commands::enumerate::run(&a),
        Command::Bench(a) => commands::bench::run(&a),
    }
}

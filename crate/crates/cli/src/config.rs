//! Config files: flat `key=value` text whose entries fill in flags that were
//! not given on the command line.
//!
//! Keys are flag names without the leading dashes (`theta-max` or
//! `theta_max`). Switches take `true` or `false`.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::Context;
use bintomo::io::read_meta;
use clap::CommandFactory;

use crate::args::Cli;
use crate::failure::Failure;

fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(tok) = it.next() {
        if tok == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = tok.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn given(argv: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    argv.iter().any(|t| *t == flag || t.starts_with(&format!("{flag}=")))
}

/// Returns `argv` with the config entries appended as flags.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let file = File::open(&path).with_context(|| format!("cannot open config {}", path.display()))?;
    let entries = read_meta(BufReader::new(file)).with_context(|| format!("cannot read config {}", path.display()))?;

    let root = Cli::command();
    let Some(sub) = argv.iter().skip(1).find_map(|t| root.find_subcommand(t)) else {
        // let clap report the missing subcommand
        return Ok(argv);
    };
    let mut merged = argv.clone();
    for (key, value) in &entries {
        let long = key.replace('_', "-");
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| Failure::Usage(format!("error: config key '{key}' is not a flag of '{}'", sub.get_name())))?;
        if long == "config" || given(&argv, &long) {
            continue;
        }
        if arg.get_action().takes_values() {
            merged.push(format!("--{long}"));
            merged.push(value.clone());
        } else {
            match value.as_str() {
                "true" => merged.push(format!("--{long}")),
                "false" => {}
                other => return Err(Failure::Usage(format!("error: config key '{key}' expects true or false, got '{other}'"))),
            }
        }
    }
    Ok(merged)
}

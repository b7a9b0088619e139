//! Command-line front end: configuration, dataset loading, CSV/SVG output.
//!
//! Subcommands: `verify`, `filters`, `simulate`, `fit`. Settings come from an
//! optional flat `key=value` config file plus `key=value` arguments, which
//! take precedence. Exit codes: 0 success, 1 verification failure, 2 usage
//! error, 3 data error, 4 numeric error.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod output;

use std::io::Write;

use crate::error::Error;
use config::RunConfig;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain(_) => EXIT_USAGE,
        Error::Data(_) | Error::Io(_) => EXIT_DATA,
        Error::Numeric(_) => EXIT_NUMERIC,
    }
}

const USAGE: &str = "usage: iterreg <verify|filters|simulate|fit> [--config <path>] [key=value ...]

subcommands:
  verify     run the filter-bound suite; exit 1 if any bound is violated
  filters    dump filter/residual traces as CSV (method,t,sigma,g,r)
  simulate   bias-variance curves over repeated sampling (CSV, optional SVG)
  fit        train/test error curves on a local delimiter-separated dataset

run `iterreg <subcommand> help` to list the keys a subcommand accepts.
";

/// Entry point shared by the binary and the integration tests. Parses
/// arguments, runs the subcommand, writes reports to `out`, and returns the
/// process exit code.
pub fn run<W: Write>(args: &[String], out: &mut W) -> i32 {
    match run_inner(args, out) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn run_inner<W: Write>(args: &[String], out: &mut W) -> crate::Result<i32> {
    let Some(subcommand) = args.first() else {
        eprint!("{USAGE}");
        return Ok(EXIT_USAGE);
    };
    if subcommand == "help" || subcommand == "--help" || subcommand == "-h" {
        write!(out, "{USAGE}")?;
        return Ok(EXIT_SUCCESS);
    }
    let rest = &args[1..];
    if rest.first().is_some_and(|a| a == "help") {
        write!(out, "{}", commands::key_help(subcommand)?)?;
        return Ok(EXIT_SUCCESS);
    }
    let config = parse_config_args(rest)?;
    match subcommand.as_str() {
        "verify" => commands::cmd_verify(&config, out),
        "filters" => commands::cmd_filters(&config, out),
        "simulate" => commands::cmd_simulate(&config, out),
        "fit" => commands::cmd_fit(&config, out),
        other => Err(Error::Domain(format!("unknown subcommand `{other}`"))),
    }
}

/// Build the effective configuration: file settings first (if any), then
/// command-line `key=value` pairs on top.
fn parse_config_args(args: &[String]) -> crate::Result<RunConfig> {
    let mut config = RunConfig::default();
    let mut overrides = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        if arg == "--config" {
            let path = args
                .get(i + 1)
                .ok_or_else(|| Error::Domain("--config needs a file path".into()))?;
            let from_file = RunConfig::from_file(std::path::Path::new(path))?;
            config.absorb(&from_file);
            i += 2;
            continue;
        }
        match arg.split_once('=') {
            Some((key, value)) if !key.is_empty() => {
                overrides.push((key.to_string(), value.to_string()));
            }
            _ => {
                return Err(Error::Domain(format!(
                    "expected key=value or --config <path>, got `{arg}`"
                )));
            }
        }
        i += 1;
    }
    for (key, value) in overrides {
        config.set(&key, &value);
    }
    Ok(config)
}

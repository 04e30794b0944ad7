//! `blackbody` command line.
//!
//! Exit codes: 0 success, 1 `verify` found a failing criterion, 2 usage
//! error, 3 domain error, 4 numerical non-convergence. Errors go to stderr
//! as one JSON object.

mod args;
mod commands;
mod config;
mod output;
mod quantity;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(blackbody::Error),
}

impl From<blackbody::Error> for CliError {
    fn from(e: blackbody::Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Library(e) if e.is_numerical() => "numerical",
            CliError::Library(_) => "domain",
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "usage" => 2,
            "domain" => 3,
            _ => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Library(e) => e.to_string(),
        }
    }
}

fn report(err: &CliError) -> ExitCode {
    let doc = json!({
        "error": {
            "kind": err.kind(),
            "exit_code": err.exit_code(),
            "message": err.message(),
        }
    });
    eprintln!("{doc}");
    ExitCode::from(err.exit_code())
}

/// Negative numbers are values, not flags, so that a negative radius is a
/// domain error rather than a usage error.
fn parse(argv: &[String]) -> Result<args::Cli, clap::Error> {
    let cmd = args::Cli::command().mut_subcommands(|s| s.allow_negative_numbers(true));
    args::Cli::from_arg_matches(&cmd.try_get_matches_from(argv)?)
}

fn run(argv: Vec<String>) -> ExitCode {
    let argv = match config::apply(argv) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => report(&CliError::Usage(e.render().to_string().trim().to_string())),
            }
        }
    };
    match commands::execute(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe is not worth an error.
            let _ = out.write_all(outcome.emitted.render().as_bytes());
            let _ = out.flush();
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report(&e),
    }
}

fn main() -> ExitCode {
    run(std::env::args().collect())
}

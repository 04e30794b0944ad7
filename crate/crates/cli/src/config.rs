//! key = value config files.
//!
//! Keys are long flag names without the dashes. Lines starting with `#` are
//! comments. Values are spliced into argv right after the subcommand, ahead
//! of the user's own flags, so flags on the command line win. A key that the
//! chosen subcommand does not take is skipped; a key no subcommand knows is
//! a usage error.

use crate::args::Cli;
use crate::CliError;
use clap::CommandFactory;
use std::collections::BTreeSet;
use std::path::PathBuf;

pub const CONFIG_ENV: &str = "BLACKBODY_CONFIG";

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, value));
    }
    Ok(out)
}

/// The config path from `--config` in argv, else the environment.
fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    std::env::var_os(CONFIG_ENV).map(PathBuf::from)
}

fn long_names(cmd: &clap::Command) -> BTreeSet<String> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect()
}

fn is_flag(cmd: &clap::Command, long: &str) -> bool {
    cmd.get_arguments()
        .find(|a| a.get_long() == Some(long))
        .map(|a| matches!(a.get_action(), clap::ArgAction::SetTrue | clap::ArgAction::SetFalse))
        .unwrap_or(false)
}

/// argv with config defaults spliced in.
pub fn apply(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let entries = parse(&text)?;

    let mut root = Cli::command();
    root.build();
    let sub_index = argv
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| root.find_subcommand(a.as_str()).is_some())
        .map(|(i, _)| i);
    let Some(sub_index) = sub_index else {
        // Let clap report the missing subcommand.
        return Ok(argv);
    };
    let sub = root
        .find_subcommand(&argv[sub_index])
        .expect("found above")
        .clone();
    let accepted = long_names(&sub);
    let known: BTreeSet<String> = root
        .get_subcommands()
        .flat_map(long_names)
        .chain(long_names(&root))
        .collect();

    let given: BTreeSet<&str> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();

    let mut spliced = Vec::new();
    for (key, value) in entries {
        if !known.contains(&key) {
            return Err(CliError::Usage(format!("config key '{key}' is not a known flag")));
        }
        if key == "config" || !accepted.contains(&key) || given.contains(key.as_str()) {
            continue;
        }
        if is_flag(&sub, &key) {
            match value.as_str() {
                "true" | "yes" | "1" => spliced.push(format!("--{key}")),
                "false" | "no" | "0" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config key '{key}' is a flag; expected true or false, got '{other}'"
                    )))
                }
            }
        } else {
            spliced.push(format!("--{key}={value}"));
        }
    }
    let mut out = argv[..=sub_index].to_vec();
    out.extend(spliced);
    out.extend_from_slice(&argv[sub_index + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let e = parse("# c\nmodel = electron\n\ntemperature=300\nrel_tol = 1e-10\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("model".into(), "electron".into()),
                ("temperature".into(), "300".into()),
                ("rel-tol".into(), "1e-10".into()),
            ]
        );
        assert!(parse("nonsense").is_err());
    }
}

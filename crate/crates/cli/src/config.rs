//! `key = value` defaults file. Entries become flags placed ahead of the
//! user's own, so a flag given on the command line overrides the file.

use std::fs;
use std::path::Path;

use crate::CliError;

const SWITCHES: [&str; 3] = ["json", "csv", "degrees"];

/// Parses the file body into `(key, value)` pairs. `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`, got `{line}`", n + 1)))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key `{key}`", n + 1)));
        }
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(entries)
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

fn as_flags(entries: &[(String, String)]) -> Result<Vec<String>, CliError> {
    let mut flags = Vec::new();
    for (key, value) in entries {
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" | "1" | "yes" => flags.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(CliError::Usage(format!("config `{key}` must be true or false, got `{value}`"))),
            }
        } else {
            flags.push(format!("--{key}={value}"));
        }
    }
    Ok(flags)
}

/// `argv` with the config file's flags spliced in after the subcommand.
pub fn expand(argv: &[String]) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(argv) else {
        return Ok(argv.to_vec());
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let flags = as_flags(&parse(&text)?)?;
    // The subcommand is the first token after the program name that is not
    // `--config` or its value.
    let mut i = 1;
    while i < argv.len() {
        match argv[i].as_str() {
            "--config" => i += 2,
            a if a.starts_with("--config=") => i += 1,
            _ => break,
        }
    }
    if i >= argv.len() {
        return Ok(argv.to_vec());
    }
    let mut out = argv[..=i].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[i + 1..]);
    Ok(out)
}

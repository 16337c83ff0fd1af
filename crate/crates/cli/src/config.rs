//! `key = value` configuration files, merged into the argument list so that
//! every key means exactly what the flag of the same name means.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;

const GLOBAL_WITH_VALUE: [&str; 4] = ["--out", "-o", "--threads", "--config"];

/// Parses the file into `(key, value)` pairs. Blank lines, `#` comments and
/// `[section]` headers are skipped; values may be quoted.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        let v = v.trim();
        let v = v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v);
        out.push((k, v.to_string()));
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if !s.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Inserts the config file's flags right after the subcommand, so flags
/// given on the command line (which come later) win. Keys whose flag reads
/// an environment variable that is set are dropped, giving the precedence
/// command line > environment > file > default.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let pairs = parse_config(&text)?;
    let Some(pos) = subcommand_position(&args) else {
        return Ok(args);
    };
    let sub_name = args[pos].to_string_lossy().to_string();
    let root = Cli::command();
    let sub = root.find_subcommand(&sub_name).ok_or_else(|| format!("unknown subcommand `{sub_name}`"))?;

    let mut extra: Vec<OsString> = Vec::new();
    for (k, v) in pairs {
        if k == "config" {
            return Err("config files cannot include other config files".into());
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(k.as_str()))
            .ok_or_else(|| format!("config key `{k}` is not a flag of `{sub_name}`"))?;
        if arg.get_env().is_some_and(|e| std::env::var_os(e).is_some()) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match v.as_str() {
                "true" => extra.push(format!("--{k}").into()),
                "false" => {}
                _ => return Err(format!("config key `{k}` expects true or false")),
            },
            _ => {
                extra.push(format!("--{k}").into());
                extra.push(v.into());
            }
        }
    }
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

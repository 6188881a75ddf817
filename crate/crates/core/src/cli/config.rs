//! `--config <path>`: a flat `key=value` file whose entries become
//! `--key value` flags. Flags given on the command line win.

use std::ffi::OsString;

use crate::error::{Error, Result};

/// Global options that take a value and may precede the subcommand.
const GLOBAL_VALUED: [&str; 3] = ["--format", "--out", "--config"];

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key=value, got '{line}'"),
        })?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "empty key".into() });
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config <path>` / `--config=<path>` from `args`, returning the path.
pub fn take_config_path(args: &mut Vec<String>) -> Result<Option<String>> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(Error::InvalidArgument("--config needs a path".into()));
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(path)
}

fn has_flag(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let with_eq = format!("{flag}=");
    args.iter().any(|a| *a == flag || a.starts_with(&with_eq))
}

/// Index of the subcommand token in `args` (skipping the program name and
/// any leading global options).
fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if GLOBAL_VALUED.contains(&a.as_str()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// Inserts config entries not already present in `args` right after the
/// subcommand. `true`/`false` values toggle bare switches.
pub fn merge(args: &mut Vec<String>, entries: &[(String, String)]) {
    let mut extra = Vec::new();
    for (k, v) in entries {
        if has_flag(args, k) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => {
                extra.push(format!("--{k}"));
                extra.push(v.clone());
            }
        }
    }
    let at = subcommand_index(args).map_or(args.len(), |i| i + 1);
    args.splice(at..at, extra);
}

pub fn to_strings<I: IntoIterator<Item = OsString>>(args: I) -> Result<Vec<String>> {
    args.into_iter()
        .map(|a| a.into_string().map_err(|a| Error::InvalidArgument(format!("non UTF-8 argument {a:?}"))))
        .collect()
}

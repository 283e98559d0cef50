//! Plain-text `key = value` configuration files.
//!
//! Keys are long flag names without the leading dashes. A file is expanded
//! into flag tokens that are inserted ahead of the command-line flags, so an
//! explicit flag always wins over the file and the file over built-in
//! defaults. Boolean flags take `true` / `false`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::Failure;

/// Removes `--config PATH` / `--config=PATH` from `args` and returns the path.
pub fn take_config_path(args: &mut Vec<String>) -> Result<Option<PathBuf>, Failure> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--" {
            break;
        }
        if let Some(p) = args[i].strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
            args.remove(i);
        } else if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(Failure::Usage("--config needs a file path".into()));
            }
            found = Some(PathBuf::from(args.remove(i + 1)));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Flag tokens for every entry in the file at `path`.
pub fn expand(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse(&text).map_err(|(line, msg)| Failure::Usage(format!("{}:{line}: {msg}", path.display())))
}

fn parse(text: &str) -> Result<Vec<String>, (usize, String)> {
    let mut tokens = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err((i + 1, format!("expected `key = value`, got `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') || key == "config" {
            return Err((i + 1, format!("invalid key `{key}`")));
        }
        match value {
            "true" => tokens.push(format!("--{key}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{key}"));
                tokens.push(value.to_string());
            }
        }
    }
    Ok(tokens)
}

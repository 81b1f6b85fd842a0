//! `key=value` config files. Entries become long flags appended after the
//! command line, only for flags the user did not pass and the chosen
//! subcommand accepts.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Command};

pub fn read(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {raw:?}", i + 1);
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Location of `--config`'s value in `argv`, if present.
pub fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn leaf<'a>(root: &'a Command, argv: &[String]) -> Vec<&'a Command> {
    let mut path = vec![root];
    for tok in argv.iter().skip(1) {
        if tok.starts_with('-') {
            continue;
        }
        if let Some(sub) = path.last().and_then(|c| c.find_subcommand(tok)) {
            path.push(sub);
        }
    }
    path
}

fn given(argv: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// `argv` with config entries appended.
pub fn merge(root: &Command, argv: Vec<String>, entries: &BTreeMap<String, String>) -> Vec<String> {
    let path = leaf(root, &argv);
    let mut extra = Vec::new();
    for (key, value) in entries {
        if key == "config" || given(&argv, key) {
            continue;
        }
        let arg = path.iter().rev().flat_map(|c| c.get_arguments()).find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = arg else { continue };
        match arg.get_action() {
            ArgAction::SetTrue => {
                if matches!(value.as_str(), "true" | "1" | "yes") {
                    extra.push(format!("--{key}"));
                }
            }
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    let mut out = argv;
    out.extend(extra);
    out
}

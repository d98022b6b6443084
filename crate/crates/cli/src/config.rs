use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::Command;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Finds `--config <path>` (or `--config=<path>`) anywhere in the arguments.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
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

/// Appends config entries as long options for the chosen subcommand, unless
/// the flag was already given on the command line. Keys the subcommand does
/// not know are skipped; keys no subcommand knows are an error.
pub fn merge_config(
    cmd: &Command,
    args: Vec<OsString>,
    config: &BTreeMap<String, String>,
) -> Result<Vec<OsString>, String> {
    // Argument arity is only filled in once the command is built.
    let mut cmd = cmd.clone();
    cmd.build();
    let cmd = &cmd;
    let Some(sub) = args
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let known_anywhere = |key: &str| {
        cmd.get_arguments()
            .chain(cmd.get_subcommands().flat_map(|s| s.get_arguments()))
            .any(|a| a.get_long() == Some(key))
    };
    let mut extra = Vec::new();
    for (key, value) in config {
        if key == "config" {
            continue;
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            if !known_anywhere(key) {
                return Err(format!("unknown config key `{key}`"));
            }
            continue;
        };
        let flag = format!("--{key}");
        let given = args.iter().any(|a| {
            let s = a.to_string_lossy();
            s == flag || s.starts_with(&format!("{flag}="))
        });
        if given {
            continue;
        }
        if arg.get_num_args().is_some_and(|n| n.takes_values()) {
            extra.push(OsString::from(flag));
            extra.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => extra.push(OsString::from(flag)),
                "false" | "no" | "0" => {}
                _ => return Err(format!("config key `{key}` expects true or false")),
            }
        }
    }
    let mut args = args;
    args.extend(extra);
    Ok(args)
}

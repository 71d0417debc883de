//! `--config FILE`: a TOML file whose keys mirror the command-line flags.
//!
//! Top-level keys apply to every subcommand; a table named after the
//! subcommand (e.g. `[learn]`) applies to that subcommand only and wins over
//! top-level keys. Flags given on the command line always win.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use toml::{Table, Value};

/// Removes `--config FILE` from `args` and returns the path, if any.
fn take_config(args: &mut Vec<OsString>) -> Result<Option<PathBuf>> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= args.len() {
                bail!("--config needs a file");
            }
            found = Some(PathBuf::from(args.remove(i + 1)));
            args.remove(i);
        } else if let Some(p) = a.strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

fn present(args: &[OsString], flag: &str) -> bool {
    args.iter().any(|a| {
        let a = a.to_string_lossy();
        a == flag || a.starts_with(&format!("{flag}="))
    })
}

fn scalar(key: &str, v: &Value) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        _ => bail!("config key `{key}`: expected a string or a number"),
    })
}

fn expand(key: &str, v: &Value, out: &mut Vec<OsString>) -> Result<()> {
    let flag = format!("--{key}");
    match v {
        Value::Boolean(true) => out.push(flag.into()),
        Value::Boolean(false) => {}
        Value::Array(items) => {
            for item in items {
                out.push(flag.clone().into());
                out.push(scalar(key, item)?.into());
            }
        }
        other => {
            out.push(flag.into());
            out.push(scalar(key, other)?.into());
        }
    }
    Ok(())
}

/// Returns `args` with the config file's settings inserted after the
/// subcommand, skipping any flag the command line already sets.
pub fn apply(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let table: Table =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Some(sub) = args.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(args);
    };
    let mut settings: Vec<(String, Value)> = Vec::new();
    for (k, v) in &table {
        if !v.is_table() {
            settings.push((k.clone(), v.clone()));
        }
    }
    if let Some(Value::Table(own)) = table.get(&sub) {
        for (k, v) in own {
            settings.retain(|(key, _)| key != k);
            settings.push((k.clone(), v.clone()));
        }
    }
    let mut extra = Vec::new();
    for (k, v) in &settings {
        if !present(&args, &format!("--{k}")) {
            expand(k, v, &mut extra)?;
        }
    }
    args.splice(2..2, extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(
            &cfg,
            "max-ops = 2\nstrict-types = true\n[learn]\nmax-ops = 3\npositive = [\"a\", \"b\"]\n",
        )
        .unwrap();
        let args: Vec<OsString> = [
            "ftlearn",
            "learn",
            "--max-ops",
            "1",
            "--config",
            cfg.to_str().unwrap(),
        ]
        .iter()
        .map(OsString::from)
        .collect();
        let out: Vec<String> = apply(args)
            .unwrap()
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        assert_eq!(out[..2], ["ftlearn", "learn"]);
        assert!(out.windows(2).any(|w| w == ["--max-ops", "1"]));
        assert!(!out.iter().any(|a| a == "3"));
        assert!(out.iter().any(|a| a == "--strict-types"));
        assert_eq!(out.iter().filter(|a| *a == "--positive").count(), 2);
    }
}

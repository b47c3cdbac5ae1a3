//! Merging a JSON config file into the command line.
//!
//! The file holds flag values keyed by flag name. They are spliced into
//! argv right after the subcommand words, ahead of the user's own flags;
//! since every flag overrides earlier occurrences of itself, the command
//! line wins.

use std::ffi::OsString;
use std::path::Path;

use serde_json::Value;

use crate::UsageError;

const NESTED: [&str; 2] = ["eval", "baseline"];

/// Path given to `--config`, if any.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Some(path.into());
        }
    }
    None
}

/// Flag values from a config file. A run manifest is accepted too; its
/// `config` object is used.
pub fn load(path: &Path) -> Result<serde_json::Map<String, Value>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("config file {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("config file {}: {e}", path.display())))?;
    let object = match value {
        Value::Object(mut map) if map.contains_key("command") && map.contains_key("outputs") => {
            map.remove("config").unwrap_or(Value::Null)
        }
        other => other,
    };
    match object {
        Value::Object(map) => Ok(map),
        _ => Err(UsageError(format!(
            "config file {} must hold a JSON object",
            path.display()
        ))),
    }
}

fn flag_tokens(config: &serde_json::Map<String, Value>) -> Result<Vec<OsString>, UsageError> {
    let scalar = |key: &str, v: &Value| -> Result<String, UsageError> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(UsageError(format!(
                "config value for {key:?} must be a string or number"
            ))),
        }
    };
    let mut out = Vec::new();
    for (key, value) in config {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(flag.into()),
            Value::Array(items) if items.is_empty() => {}
            Value::Array(items) => {
                let joined = items
                    .iter()
                    .map(|v| scalar(key, v))
                    .collect::<Result<Vec<_>, _>>()?
                    .join(",");
                out.push(flag.into());
                out.push(joined.into());
            }
            Value::Object(_) => {
                return Err(UsageError(format!(
                    "config value for {key:?} must not be an object"
                )))
            }
            v => {
                out.push(flag.into());
                out.push(scalar(key, v)?.into());
            }
        }
    }
    Ok(out)
}

/// argv with the config flags inserted after the subcommand words.
pub fn splice(
    argv: Vec<OsString>,
    config: &serde_json::Map<String, Value>,
) -> Result<Vec<OsString>, UsageError> {
    let tokens = flag_tokens(config)?;
    let first = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'));
    let Some(first) = first.map(|p| p + 1) else {
        return Ok(argv);
    };
    let mut at = first + 1;
    if NESTED.contains(&argv[first].to_string_lossy().as_ref()) && at < argv.len() {
        at += 1;
    }
    let mut out = argv[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn splices_after_nested_subcommand() {
        let config = json!({"buckets": [10, 20], "commons": true, "out": null, "json": false});
        let argv = os(&["wikivec", "eval", "analogy", "--vectors", "a.vec"]);
        let got = splice(argv, config.as_object().unwrap()).unwrap();
        assert_eq!(
            got,
            os(&[
                "wikivec",
                "eval",
                "analogy",
                "--buckets",
                "10,20",
                "--commons",
                "--vectors",
                "a.vec"
            ])
        );
    }

    #[test]
    fn finds_config_path() {
        assert_eq!(
            config_path(&os(&["w", "train", "--config", "c.json"])),
            Some("c.json".into())
        );
        assert_eq!(
            config_path(&os(&["w", "--config=c.json", "train"])),
            Some("c.json".into())
        );
        assert_eq!(config_path(&os(&["w", "train"])), None);
    }

    #[test]
    fn manifest_config_is_unwrapped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(
            &path,
            r#"{"command":"train","config":{"dim":8},"inputs":[],"outputs":[]}"#,
        )
        .unwrap();
        let map = load(&path).unwrap();
        assert_eq!(map["dim"], 8);
    }
}

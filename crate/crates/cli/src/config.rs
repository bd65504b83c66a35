use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Reads a JSON or TOML file, unwrapping a run manifest for `command`.
pub fn load(path: &Path, command: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let is_toml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let value: Value = if is_toml {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    };
    if !value.is_object() {
        return Err(CliError::Config(format!(
            "{}: configuration must be a table",
            path.display()
        )));
    }
    unwrap_manifest(value, command)
}

fn unwrap_manifest(value: Value, command: &str) -> Result<Value, CliError> {
    let is_manifest = value.get("tool").and_then(Value::as_str)
        == Some(nhsta::experiments::io::TOOL)
        && value.get("config").is_some()
        && value.get("command").is_some();
    if !is_manifest {
        return Ok(value);
    }
    match value.get("command").and_then(Value::as_str) {
        Some(c) if c == command => Ok(value["config"].clone()),
        other => Err(CliError::Config(format!(
            "manifest was produced by `{}`, not `{command}`",
            other.unwrap_or("?")
        ))),
    }
}

/// Overlays `patch` onto `base`, recursing through tables.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// `defaults`, overlaid with the file at `path` when given.
pub fn resolve<C>(defaults: &C, path: Option<&Path>, command: &str) -> Result<C, CliError>
where
    C: Serialize + DeserializeOwned,
{
    let mut value = serde_json::to_value(defaults).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(p) = path {
        merge(&mut value, load(p, command)?);
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("configuration: {e}")))
}

//! Layered configuration: defaults, then a TOML file, then environment
//! variables, then `--set key=value` overrides.

use std::path::Path;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::sim::SimulationConfig;

/// Prefix of environment overrides. `MMIMOU_SCHEDULER__K_I=4` sets
/// `scheduler.k_i`.
pub const ENV_PREFIX: &str = "MMIMOU_";

/// Keys that have no default value and are therefore absent from the
/// serialized defaults.
const OPTIONAL_KEYS: [(&str, &str); 2] = [("array", "antennas"), ("scheduler", "d_i")];

/// Builds the configuration from an optional file and `key=value`
/// overrides applied in order, then checks it.
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<SimulationConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::config("config", e.to_string()))?;
    // reject a bad file before blaming an override
    SimulationConfig::from_toml(&text)?;
    for item in overrides {
        let (key, value) = split_override(item)?;
        let key = resolve_key(key)?;
        set_dotted(&mut table, &key, parse_value(value))?;
        SimulationConfig::from_toml(&table.to_string()).map_err(|e| Error::config(&key, e.to_string()))?;
    }
    let config = SimulationConfig::from_toml(&table.to_string())?;
    config.validate()?;
    Ok(config)
}

/// Converts `MMIMOU_`-prefixed variables into `key=value` overrides, sorted
/// by key so the result does not depend on the environment's order.
pub fn env_overrides<I>(vars: I) -> Vec<String>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut out: Vec<(String, String)> = vars
        .into_iter()
        .filter_map(|(k, v)| {
            let rest = k.strip_prefix(ENV_PREFIX)?;
            Some((rest.to_ascii_lowercase().replace("__", "."), v))
        })
        .collect();
    out.sort();
    out.into_iter().map(|(k, v)| format!("{k}={v}")).collect()
}

fn split_override(item: &str) -> Result<(&str, &str)> {
    let (k, v) = item
        .split_once('=')
        .ok_or_else(|| Error::config(item, "override must look like key=value"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::config(item, "empty key"));
    }
    Ok((k, v.trim()))
}

/// Values are read as TOML literals, anything else as a bare string.
fn parse_value(text: &str) -> Value {
    format!("v = {text}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(text.to_string()))
}

/// Expands a bare leaf name such as `d_i` to its section when the name is
/// unique across sections.
fn resolve_key(key: &str) -> Result<String> {
    if key.contains('.') {
        return Ok(key.to_string());
    }
    let defaults: Table = SimulationConfig::default()
        .to_toml()
        .parse()
        .expect("defaults serialize to a table");
    if defaults.get(key).is_some_and(|v| !v.is_table()) {
        return Ok(key.to_string());
    }
    let mut owners: Vec<String> = defaults
        .iter()
        .filter(|(_, v)| v.as_table().is_some_and(|t| t.contains_key(key)))
        .map(|(s, _)| s.clone())
        .collect();
    owners.extend(OPTIONAL_KEYS.iter().filter(|(_, k)| *k == key).map(|(s, _)| s.to_string()));
    owners.dedup();
    match owners.as_slice() {
        [section] => Ok(format!("{section}.{key}")),
        [] => Err(Error::config(key, "unknown key")),
        _ => Err(Error::config(key, format!("ambiguous key, qualify it with one of {}", owners.join(", ")))),
    }
}

fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().expect("split yields at least one part");
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{p}` is not a section")))?;
    }
    cur.insert(leaf.to_string(), value);
    Ok(())
}

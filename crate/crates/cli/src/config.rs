//! The run configuration: flags merged over an optional `key=value` file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every input of a run, kept as entered so it can be echoed verbatim.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub digits: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub format: String,
    pub seed: u64,
    pub cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// Keys a config file may set, with the commands that accept them.
const KEYS: &[(&str, &[&str])] = &[
    ("target", &["check"]),
    ("b", &["regime", "verdict", "classify", "census", "predict"]),
    ("D", &["verdict", "classify", "census", "predict"]),
    ("t", &["regime", "verdict", "census", "predict"]),
    ("p", &["classify"]),
    ("n", &["classify", "census"]),
    ("r", &["classify", "census"]),
    ("psi", &["verdict", "predict"]),
    ("f", &["verdict"]),
    ("A", &["verdict"]),
    ("lambda", &["predict"]),
    ("theta", &["census", "predict"]),
    ("method", &["census"]),
    ("format", &[]),
    ("seed", &[]),
    ("cap", &[]),
    ("workers", &[]),
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got `{raw}`", i + 1)))?;
        let key = k.trim().to_string();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: `{key}` set twice", i + 1)));
        }
    }
    Ok(out)
}

impl RunConfig {
    /// Fills unset fields from a config file; flags given on the command
    /// line always win.
    pub fn merge(&mut self, file: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (key, value) in file {
            self.set_default(key, value.clone())?;
        }
        Ok(())
    }

    fn set_default(&mut self, key: &str, value: String) -> Result<(), CliError> {
        let allowed = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| CliError::Usage(format!("unknown config key `{key}`")))?
            .1;
        if !allowed.is_empty() && !allowed.contains(&self.command.as_str()) {
            return Err(CliError::Usage(format!("key `{key}` does not apply to `{}`", self.command)));
        }
        let slot = match key {
            "target" => &mut self.target,
            "b" => &mut self.b,
            "D" => &mut self.digits,
            "t" => &mut self.t,
            "p" => &mut self.p,
            "n" => &mut self.n,
            "r" => &mut self.r,
            "psi" => &mut self.psi,
            "f" => &mut self.f,
            "A" => &mut self.sequence,
            "lambda" => &mut self.lambda,
            "theta" => &mut self.theta,
            "method" => &mut self.method,
            // the remaining keys carry defaults and are resolved in `main`
            _ => return Ok(()),
        };
        if slot.is_none() {
            *slot = Some(value);
        }
        Ok(())
    }

    /// `key = value` lines for the set fields, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("config serializes");
        let map = value.as_object().expect("config is an object");
        KEYS.iter()
            .filter_map(|(k, _)| {
                map.get(*k).map(|v| {
                    let text = match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    (k.to_string(), text)
                })
            })
            .collect()
    }

    /// The config as a file [`load`] reads back.
    #[cfg(test)]
    pub fn to_file(&self) -> String {
        self.echo().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_file(&text)
}

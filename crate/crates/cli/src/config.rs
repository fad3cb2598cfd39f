use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::Value;

use crate::args::Format;

/// A complete invocation stored as JSON, e.g.
///
/// ```json
/// {"command": "suffcheck", "seed": 7, "options": {"divergence": "kl", "dims": "3,4"}}
/// ```
///
/// `inputs` and `options` become `--key value` pairs; `true` becomes a bare
/// flag and arrays are passed as JSON text.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub format: Option<Format>,
    #[serde(default)]
    pub bits: bool,
    #[serde(default)]
    pub options: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Equivalent argument vector, starting with the program name.
    pub fn to_argv(&self, program: &str) -> Result<Vec<String>> {
        let mut argv = vec![program.to_string()];
        if self.bits {
            argv.push("--bits".into());
        }
        if let Some(format) = self.format {
            argv.push("--format".into());
            argv.push(match format {
                Format::Json => "json".into(),
                Format::Csv => "csv".into(),
            });
        }
        if let Some(tol) = self.tolerance {
            argv.push("--tol".into());
            argv.push(tol.to_string());
        }
        let words: Vec<&str> = self.command.split_whitespace().collect();
        if words.is_empty() {
            bail!("config `command` is empty");
        }
        argv.extend(words.iter().map(|w| w.to_string()));
        if let Some(seed) = self.seed {
            argv.push("--seed".into());
            argv.push(seed.to_string());
        }
        for (key, path) in &self.inputs {
            argv.push(format!("--{key}"));
            argv.push(path.clone());
        }
        for (key, value) in &self.options {
            match value {
                Value::Bool(true) => argv.push(format!("--{key}")),
                Value::Bool(false) => {}
                Value::String(s) => {
                    argv.push(format!("--{key}"));
                    argv.push(s.clone());
                }
                Value::Null => bail!("config option `{key}` is null"),
                other => {
                    argv.push(format!("--{key}"));
                    argv.push(other.to_string());
                }
            }
        }
        Ok(argv)
    }
}

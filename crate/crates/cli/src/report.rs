use std::f64::consts::LN_2;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// Ordered report body. Fields keep insertion order in the output.
#[derive(Debug)]
pub struct Report {
    command: String,
    bits: bool,
    body: Map<String, Value>,
}

/// Finite values as JSON numbers, the rest as `"inf"`, `"-inf"`, `"nan"`.
pub fn real(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

impl Report {
    pub fn new(command: &str, bits: bool) -> Self {
        Self {
            command: command.to_string(),
            bits,
            body: Map::new(),
        }
    }

    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.body.insert(key.to_string(), real(x));
        self
    }

    pub fn reals(&mut self, key: &str, xs: &[f64]) -> &mut Self {
        self.body.insert(key.to_string(), xs.iter().map(|&x| real(x)).collect());
        self
    }

    /// A quantity in nats, stored as `<key>_nats` or converted to `<key>_bits`.
    pub fn info(&mut self, key: &str, nats: f64) -> &mut Self {
        let (suffix, value) = self.unit(nats);
        self.body.insert(format!("{key}_{suffix}"), real(value));
        self
    }

    pub fn info_path(&mut self, key: &str, nats: &[f64]) -> &mut Self {
        let suffix = if self.bits { "bits" } else { "nats" };
        let values = nats.iter().map(|&x| real(self.unit(x).1)).collect();
        self.body.insert(format!("{key}_{suffix}"), values);
        self
    }

    pub fn unit(&self, nats: f64) -> (&'static str, f64) {
        if self.bits {
            ("bits", nats / LN_2)
        } else {
            ("nats", nats)
        }
    }

    pub fn field<T: Serialize>(&mut self, key: &str, value: &T) -> Result<&mut Self> {
        let value = serde_json::to_value(value).with_context(|| format!("serializing `{key}`"))?;
        self.body.insert(key.to_string(), value);
        Ok(self)
    }

    /// Copies the top-level fields of a serializable struct into the body.
    pub fn extend<T: Serialize>(&mut self, value: &T) -> Result<&mut Self> {
        match serde_json::to_value(value)? {
            Value::Object(map) => self.body.extend(map),
            other => anyhow::bail!("expected an object, got {other}"),
        }
        Ok(self)
    }

    fn envelope(&self) -> Map<String, Value> {
        let mut out = Map::new();
        out.insert("schema_version".into(), SCHEMA_VERSION.into());
        out.insert("command".into(), self.command.clone().into());
        out.extend(self.body.clone());
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let full = self.envelope();
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&Value::Object(full))? + "\n"),
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(Vec::new());
                writer.write_record(full.keys())?;
                writer.write_record(full.values().map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                }))?;
                Ok(String::from_utf8(writer.into_inner()?)?)
            }
        }
    }
}

use std::fs;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use lingam_spp::Method;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::Invalid;

/// Overlays the flags that were given on top of the `--config` file and
/// reads the result back into the same option struct.
pub fn resolve<T: Serialize + DeserializeOwned>(config: Option<&Path>, flags: &T) -> anyhow::Result<T> {
    let mut merged = match config {
        None => Map::new(),
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(Invalid("config file must hold a JSON object".into()).into()),
                Err(e) => return Err(Invalid(format!("config {}: {e}", path.display())).into()),
            }
        }
    };
    if let Value::Object(given) = serde_json::to_value(flags)? {
        merged.extend(given);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Invalid(format!("options: {e}")).into())
}

/// Parses a core enum from its serialized name, accepting kebab or lower case.
pub fn parse_named<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    let exact = serde_json::from_value(Value::String(s.to_string()));
    exact.or_else(|_| serde_json::from_value(Value::String(s.to_uppercase().replace('-', "_")))).map_err(|e| e.to_string())
}

pub fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    SppPlr,
    DirectPlr,
    SppKnn,
}

impl MethodName {
    pub fn method(self) -> Method {
        match self {
            MethodName::SppPlr => Method::PlrSpp,
            MethodName::DirectPlr => Method::PlrDirect,
            MethodName::SppKnn => Method::KnnSpp,
        }
    }

    pub fn of(method: Method) -> &'static str {
        match method {
            Method::PlrSpp => "spp-plr",
            Method::PlrDirect => "direct-plr",
            Method::KnnSpp => "spp-knn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureName {
    Plr,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Exhaustive,
    Sample,
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Invalid(format!("{what} {}: {e}", path.display())).into())
}

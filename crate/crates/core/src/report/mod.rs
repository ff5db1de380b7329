//! Artifact writers: JSON documents with provenance, and SVG charts.

pub mod svg;

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL: &str = "prunekit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'a str,
    version: &'a str,
    config_hash: &'a str,
    artifact: &'a str,
    data: &'a T,
}

/// Hex SHA-256 of the given bytes (used for config provenance).
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty JSON wrapping `data` with tool name, version and config hash.
pub fn to_json_artifact<T: Serialize>(artifact: &str, config_hash: &str, data: &T) -> Result<String> {
    let env = Envelope {
        tool: TOOL,
        version: VERSION,
        config_hash,
        artifact,
        data,
    };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

/// Reads the `data` member of an artifact written by [`to_json_artifact`].
pub fn from_json_artifact<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let data = value
        .get_mut("data")
        .map(serde_json::Value::take)
        .ok_or_else(|| Error::invalid("artifact has no data member"))?;
    Ok(serde_json::from_value(data)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

//! Report envelopes shared by every command.
//!
//! JSON reports have the shape `{tool, version, command, config, seed,
//! inputs, result}`. CSV tables start with `# `-prefixed lines carrying the
//! same metadata. Nothing time-dependent is written, so identical flags give
//! identical bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::VERSION;

pub const TOOL: &str = "pillow";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest_bytes(path: &str, bytes: &[u8]) -> InputDigest {
    InputDigest {
        path: path.to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(digest_bytes(&path.display().to_string(), &bytes))
}

/// Metadata of one invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
}

impl Provenance {
    pub fn new(command: impl Into<String>, config: Value, seed: Option<u64>) -> Self {
        Provenance {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            config,
            seed,
            inputs: Vec::new(),
        }
    }

    pub fn with_input(mut self, input: InputDigest) -> Self {
        self.inputs.push(input);
        self
    }

    pub fn csv_header<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {} {} {}", self.tool, self.version, self.command)?;
        writeln!(out, "# config {}", self.config)?;
        match self.seed {
            Some(s) => writeln!(out, "# seed {s}")?,
            None => writeln!(out, "# seed none")?,
        }
        for i in &self.inputs {
            writeln!(out, "# input {} sha256 {}", i.path, i.sha256)?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, result: &T) -> Result<Value> {
        let mut v = serde_json::to_value(self).map_err(|e| Error::Format(e.to_string()))?;
        let result = serde_json::to_value(result).map_err(|e| Error::Format(e.to_string()))?;
        v.as_object_mut().expect("struct serializes to an object").insert("result".into(), result);
        Ok(v)
    }

    pub fn write_json<T: Serialize, W: Write>(&self, result: &T, mut out: W) -> Result<()> {
        let v = self.json(result)?;
        serde_json::to_writer_pretty(&mut out, &v).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(out).map_err(|e| Error::io("<output>", e))
    }
}

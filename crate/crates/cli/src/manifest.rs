//! Run manifests: the full parameter set of an invocation, embedded
//! verbatim in every report so a run can be reproduced byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Resolved parameters, sorted by name.
    pub params: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    /// SHA-256 digests of input files, keyed by the path as given.
    pub input_digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            params: BTreeMap::new(),
            seeds: Vec::new(),
            input_digests: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: impl ToString) -> RunManifest {
        self.params.insert(name.to_string(), value.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> RunManifest {
        self.seeds.push(seed);
        self
    }

    pub fn input(mut self, path: &Path, bytes: &[u8]) -> RunManifest {
        self.input_digests.insert(
            path.display().to_string(),
            hex::encode(Sha256::digest(bytes)),
        );
        self
    }
}

/// A report document: the manifest plus the payload.
#[derive(Debug, Serialize)]
pub struct Document<T: Serialize> {
    pub manifest: RunManifest,
    pub report: T,
}

/// Render a document as pretty JSON with a trailing newline; field order is
/// struct order, so identical inputs give identical bytes.
pub fn to_json<T: Serialize>(manifest: RunManifest, report: T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(&Document { manifest, report })
        .context("serializing report")?;
    text.push('\n');
    Ok(text)
}

//! Deterministic artifact writers.
//!
//! Every file the CLI produces embeds the same provenance trio: the tool
//! version, the master seed when the command is stochastic, and a short hash
//! of the effective configuration. CSV artifacts carry it as `# key=value`
//! comment lines before the header; JSON artifacts carry it in a `meta`
//! object. No artifact contains timestamps, so rerunning a command with the
//! same inputs and settings reproduces the output byte for byte.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{write_matrix_csv, CorpusError, ScoreMatrix};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block stamped into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(seed: Option<u64>, config: &impl Serialize) -> Provenance {
        Provenance {
            tool_version: TOOL_VERSION.to_string(),
            seed,
            config_hash: config_hash(config),
        }
    }

    /// Key/value pairs in header order, optionally extended with
    /// command-specific extras.
    pub fn header_pairs(&self, extra: &[(String, String)]) -> Vec<(String, String)> {
        let mut pairs = vec![("tool_version".to_string(), self.tool_version.clone())];
        if let Some(seed) = self.seed {
            pairs.push(("seed".to_string(), seed.to_string()));
        }
        pairs.push(("config_hash".to_string(), self.config_hash.clone()));
        pairs.extend(extra.iter().cloned());
        pairs
    }
}

/// Short hex digest of the JSON-encoded effective configuration.
pub fn config_hash(config: &impl Serialize) -> String {
    let encoded = serde_json::to_string(config).expect("configuration always encodes");
    hex::encode(&Sha256::digest(encoded.as_bytes())[..8])
}

/// Score matrix CSV with provenance comments.
pub fn write_matrix_artifact(
    path: &Path,
    matrix: &ScoreMatrix,
    prov: &Provenance,
    extra: &[(String, String)],
) -> Result<(), CorpusError> {
    write_matrix_csv(path, matrix, &prov.header_pairs(extra))
}

/// Generic table CSV: provenance comments, then a header row, then data rows.
pub fn write_table(
    path: &Path,
    prov: &Provenance,
    extra: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut file = File::create(path)?;
    for (key, value) in prov.header_pairs(extra) {
        writeln!(file, "# {key}={value}")?;
    }
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(columns).map_err(csv_to_io)?;
    for row in rows {
        writer.write_record(row).map_err(csv_to_io)?;
    }
    writer.flush()?;
    Ok(())
}

/// JSON artifact: `meta` object first, then the body fields, pretty-printed
/// with a trailing newline. Keys serialize in sorted order.
pub fn write_json(
    path: &Path,
    prov: &Provenance,
    body: serde_json::Value,
) -> std::io::Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert(
        "meta".to_string(),
        serde_json::to_value(prov).expect("provenance always encodes"),
    );
    if let serde_json::Value::Object(fields) = body {
        doc.extend(fields);
    } else {
        doc.insert("value".to_string(), body);
    }
    let mut encoded = serde_json::to_vec_pretty(&serde_json::Value::Object(doc))?;
    encoded.push(b'\n');
    std::fs::write(path, encoded)
}

/// Shortest round-trip decimal form of a float, with empty string for None.
pub fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_to_io(err: csv::Error) -> std::io::Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("csv write failed: {other:?}")),
    }
}

//! Report assembly: folds every artifact in a directory into a single
//! machine-readable JSON document plus a tidy long-format CSV.
//!
//! A previous report in the same directory is excluded from the scan, so
//! regenerating over identical inputs reproduces both files byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::args::ReportArgs;
use super::artifacts::{self, Provenance};
use super::{ensure_out_dir, require_dir, CliError};

const REPORT_JSON: &str = "report.json";
const REPORT_LONG: &str = "report_long.csv";

struct CsvArtifact {
    meta: BTreeMap<String, String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn cmd_report(a: ReportArgs) -> Result<String, CliError> {
    require_dir(&a.dir)?;
    let out_dir = a.out.clone().unwrap_or_else(|| a.dir.clone());

    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();

    let mut merged = serde_json::Map::new();
    let mut long_rows: Vec<Vec<String>> = Vec::new();
    for path in &files {
        let name = match path.file_name() {
            Some(n) => n.to_string_lossy().into_owned(),
            None => continue,
        };
        if name == REPORT_JSON || name == REPORT_LONG {
            continue;
        }
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => {
                let table = parse_csv_artifact(path)?;
                for (i, row) in table.rows.iter().enumerate() {
                    for (col, value) in table.columns.iter().zip(row) {
                        long_rows.push(vec![
                            name.clone(),
                            (i + 1).to_string(),
                            col.clone(),
                            value.clone(),
                        ]);
                    }
                }
                merged.insert(
                    name,
                    json!({
                        "kind": "table",
                        "meta": table.meta,
                        "columns": table.columns,
                        "rows": table.rows,
                    }),
                );
            }
            Some("json") => {
                let text = std::fs::read_to_string(path)?;
                let content: Value = serde_json::from_str(&text).map_err(|e| {
                    CliError::Compute(format!("{}: not valid JSON: {e}", path.display()))
                })?;
                let mut leaves = Vec::new();
                flatten_json("", &content, &mut leaves);
                for (pointer, value) in leaves {
                    long_rows.push(vec![name.clone(), String::new(), pointer, value]);
                }
                merged.insert(name, json!({"kind": "document", "content": content}));
            }
            _ => continue,
        }
    }

    if merged.is_empty() {
        return Err(CliError::Compute(format!(
            "missing artifacts: {} contains no CSV or JSON artifacts",
            a.dir.display()
        )));
    }

    ensure_out_dir(&out_dir)?;
    let names: Vec<String> = merged.keys().cloned().collect();
    let prov = Provenance::new(None, &json!({"command": "report", "artifacts": names}));
    artifacts::write_json(
        &out_dir.join(REPORT_JSON),
        &prov,
        json!({"artifacts": Value::Object(merged)}),
    )?;
    artifacts::write_table(
        &out_dir.join(REPORT_LONG),
        &prov,
        &[],
        &["artifact", "row", "column", "value"],
        &long_rows,
    )?;
    Ok(format!(
        "merged {} artifacts into {}",
        names.len(),
        out_dir.join(REPORT_JSON).display()
    ))
}

/// Splits an artifact CSV into its `# key=value` provenance comments, the
/// header row, and the data rows.
fn parse_csv_artifact(path: &Path) -> Result<CsvArtifact, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut meta = BTreeMap::new();
    let mut body_start = 0;
    for line in text.lines() {
        let Some(comment) = line.strip_prefix('#') else {
            break;
        };
        body_start += line.len() + 1;
        if let Some((key, value)) = comment.trim().split_once('=') {
            meta.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    let body = text.get(body_start..).unwrap_or("");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(body.as_bytes());
    let columns: Vec<String> = match reader.headers() {
        Ok(headers) => headers.iter().map(String::from).collect(),
        Err(e) => {
            return Err(CliError::Compute(format!(
                "{}: bad CSV header: {e}",
                path.display()
            )))
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            CliError::Compute(format!("{}: bad CSV row: {e}", path.display()))
        })?;
        rows.push(record.iter().map(String::from).collect());
    }
    Ok(CsvArtifact { meta, columns, rows })
}

/// Collects (json-pointer, scalar) pairs for every leaf of a JSON document.
fn flatten_json(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                flatten_json(&format!("{prefix}/{key}"), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}/{i}"), child, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

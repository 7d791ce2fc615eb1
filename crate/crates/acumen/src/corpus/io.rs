//! Ingestion and serialization: line-delimited JSON for annotation records,
//! CSV for score matrices.
//!
//! Loading is strict by default (the first integrity violation aborts); in
//! lenient mode bad records are dropped, logged, and listed in the report,
//! so a benchmark analysis never silently runs on skewed data.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    Corpus, CorpusError, Example, LikertAnnotation, MatchAnnotation, ScoreMatrix, SystemOutput,
};

/// Input files by kind. Only `examples` is mandatory.
#[derive(Debug, Clone, Default)]
pub struct LoadPaths {
    pub examples: PathBuf,
    pub outputs: Option<PathBuf>,
    pub match_annotations: Option<PathBuf>,
    pub likert_annotations: Option<PathBuf>,
    /// metric name -> CSV path
    pub external_metrics: BTreeMap<String, PathBuf>,
}

/// Loader paths for a benchmark directory: `examples.jsonl` plus whichever
/// optional layers and `metrics/*.csv` matrices exist. The examples path is
/// filled in unconditionally so a missing file surfaces as a load error.
pub fn benchmark_dir_paths(dir: &Path) -> std::io::Result<LoadPaths> {
    let optional = |name: &str| {
        let path = dir.join(name);
        path.is_file().then_some(path)
    };
    let mut external_metrics = BTreeMap::new();
    let metrics_dir = dir.join("metrics");
    if metrics_dir.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&metrics_dir)?
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|entry| entry.path())
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "csv"))
            .collect();
        files.sort();
        for path in files {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            external_metrics.insert(name, path);
        }
    }
    Ok(LoadPaths {
        examples: dir.join("examples.jsonl"),
        outputs: optional("outputs.jsonl"),
        match_annotations: optional("acu_annotations.jsonl"),
        likert_annotations: optional("likert_annotations.jsonl"),
        external_metrics,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Drop and log offending records instead of failing fast.
    pub lenient: bool,
}

/// Counts of loaded records plus descriptions of anything dropped in
/// lenient mode.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LoadReport {
    pub examples: usize,
    pub systems: usize,
    pub outputs: usize,
    pub match_annotations: usize,
    pub likert_annotations: usize,
    pub external_metrics: usize,
    pub dropped: Vec<String>,
}

struct Loader {
    lenient: bool,
    dropped: Vec<String>,
}

impl Loader {
    /// In strict mode propagates the error; in lenient mode records it and
    /// lets the caller skip the record.
    fn tolerate(&mut self, err: CorpusError) -> Result<(), CorpusError> {
        if self.lenient {
            log::warn!("dropping record: {err}");
            self.dropped.push(err.to_string());
            Ok(())
        } else {
            Err(err)
        }
    }
}

pub fn load_benchmark(
    paths: &LoadPaths,
    options: &LoadOptions,
) -> Result<(Corpus, LoadReport), CorpusError> {
    let mut loader = Loader {
        lenient: options.lenient,
        dropped: Vec::new(),
    };

    let mut examples: Vec<Example> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for (line_no, record) in read_jsonl::<Example>(&paths.examples)? {
            let ex: Example = match record {
                Ok(ex) => ex,
                Err(reason) => {
                    loader.tolerate(malformed(&paths.examples, line_no, reason))?;
                    continue;
                }
            };
            if let Err(reason) = validate_example(&ex) {
                loader.tolerate(malformed(&paths.examples, line_no, reason))?;
                continue;
            }
            if !seen.insert(ex.example_id.clone()) {
                loader.tolerate(CorpusError::DuplicateKey {
                    context: format!("{}:{}", paths.examples.display(), line_no),
                    key: ex.example_id.clone(),
                })?;
                continue;
            }
            examples.push(ex);
        }
    }
    let example_ids: std::collections::HashSet<String> =
        examples.iter().map(|e| e.example_id.clone()).collect();
    let acus_by_example: std::collections::HashMap<&str, Vec<&str>> = examples
        .iter()
        .map(|e| {
            (
                e.example_id.as_str(),
                e.acus.iter().map(|a| a.acu_id.as_str()).collect(),
            )
        })
        .collect();

    let mut outputs: Vec<SystemOutput> = Vec::new();
    if let Some(path) = &paths.outputs {
        let mut seen = std::collections::HashSet::new();
        for (line_no, record) in read_jsonl::<SystemOutput>(path)? {
            let out: SystemOutput = match record {
                Ok(o) => o,
                Err(reason) => {
                    loader.tolerate(malformed(path, line_no, reason))?;
                    continue;
                }
            };
            if !example_ids.contains(&out.example_id) {
                loader.tolerate(CorpusError::DanglingReference {
                    context: format!("{}:{}", path.display(), line_no),
                    reference: format!("example '{}'", out.example_id),
                })?;
                continue;
            }
            if !seen.insert((out.system.clone(), out.example_id.clone())) {
                loader.tolerate(CorpusError::DuplicateKey {
                    context: format!("{}:{}", path.display(), line_no),
                    key: format!("({}, {})", out.system, out.example_id),
                })?;
                continue;
            }
            outputs.push(out);
        }
    }
    let output_keys: std::collections::HashSet<(String, String)> = outputs
        .iter()
        .map(|o| (o.system.clone(), o.example_id.clone()))
        .collect();

    let mut match_annotations: Vec<MatchAnnotation> = Vec::new();
    if let Some(path) = &paths.match_annotations {
        let mut seen = std::collections::HashSet::new();
        for (line_no, record) in read_jsonl::<MatchAnnotation>(path)? {
            let ann: MatchAnnotation = match record {
                Ok(a) => a,
                Err(reason) => {
                    loader.tolerate(malformed(path, line_no, reason))?;
                    continue;
                }
            };
            if let Err(err) = validate_match_record(
                &ann,
                &output_keys,
                &acus_by_example,
                path,
                line_no,
            ) {
                loader.tolerate(err)?;
                continue;
            }
            if !seen.insert((
                ann.example_id.clone(),
                ann.system.clone(),
                ann.worker_id.clone(),
            )) {
                loader.tolerate(CorpusError::DuplicateKey {
                    context: format!("{}:{}", path.display(), line_no),
                    key: format!("({}, {}, {})", ann.example_id, ann.system, ann.worker_id),
                })?;
                continue;
            }
            match_annotations.push(ann);
        }
    }

    let mut likert_annotations: Vec<LikertAnnotation> = Vec::new();
    if let Some(path) = &paths.likert_annotations {
        let mut seen = std::collections::HashSet::new();
        for (line_no, record) in read_jsonl::<LikertAnnotation>(path)? {
            let ann: LikertAnnotation = match record {
                Ok(a) => a,
                Err(reason) => {
                    loader.tolerate(malformed(path, line_no, reason))?;
                    continue;
                }
            };
            if !(1..=5).contains(&ann.score) {
                loader.tolerate(malformed(
                    path,
                    line_no,
                    format!("likert score {} outside 1..=5", ann.score),
                ))?;
                continue;
            }
            if !output_keys.contains(&(ann.system.clone(), ann.example_id.clone())) {
                loader.tolerate(CorpusError::DanglingReference {
                    context: format!("{}:{}", path.display(), line_no),
                    reference: format!("output ({}, {})", ann.system, ann.example_id),
                })?;
                continue;
            }
            if !seen.insert((
                ann.example_id.clone(),
                ann.system.clone(),
                ann.worker_id.clone(),
                ann.protocol,
            )) {
                loader.tolerate(CorpusError::DuplicateKey {
                    context: format!("{}:{}", path.display(), line_no),
                    key: format!("({}, {}, {})", ann.example_id, ann.system, ann.worker_id),
                })?;
                continue;
            }
            likert_annotations.push(ann);
        }
    }

    let mut external: BTreeMap<String, ScoreMatrix> = BTreeMap::new();
    for (name, path) in &paths.external_metrics {
        let matrix = read_matrix_csv(path)?;
        let mut bad_rows = Vec::new();
        for (i, id) in matrix.example_ids().iter().enumerate() {
            if !example_ids.contains(id) {
                bad_rows.push(i);
            }
        }
        if bad_rows.is_empty() {
            external.insert(name.clone(), matrix);
            continue;
        }
        let first_bad = matrix.example_ids()[bad_rows[0]].clone();
        loader.tolerate(CorpusError::DanglingReference {
            context: format!("metric '{name}' ({})", path.display()),
            reference: format!("example '{first_bad}'"),
        })?;
        // Lenient: keep only rows whose example exists.
        let keep: Vec<usize> = (0..matrix.n_examples())
            .filter(|i| !bad_rows.contains(i))
            .collect();
        if keep.is_empty() {
            loader.dropped.push(format!(
                "metric '{name}': every row referenced an unknown example; matrix dropped"
            ));
            continue;
        }
        let kept_ids: Vec<String> = keep
            .iter()
            .map(|&i| matrix.example_ids()[i].clone())
            .collect();
        let mut values = Vec::with_capacity(keep.len() * matrix.n_systems());
        for &i in &keep {
            values.extend_from_slice(matrix.row(i));
        }
        external.insert(
            name.clone(),
            ScoreMatrix::new(kept_ids, matrix.systems().to_vec(), values)?,
        );
    }

    let report = LoadReport {
        examples: examples.len(),
        systems: {
            let mut names = std::collections::HashSet::new();
            outputs.iter().for_each(|o| {
                names.insert(o.system.as_str());
            });
            names.len()
        },
        outputs: outputs.len(),
        match_annotations: match_annotations.len(),
        likert_annotations: likert_annotations.len(),
        external_metrics: external.len(),
        dropped: loader.dropped,
    };
    let corpus = Corpus::from_parts(
        examples,
        outputs,
        match_annotations,
        likert_annotations,
        external,
    )?;
    Ok((corpus, report))
}

/// Writes a corpus back out in the same formats `load_benchmark` reads, so a
/// load/save/load round trip is the identity.
pub fn save_benchmark(corpus: &Corpus, dir: &Path) -> Result<(), CorpusError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    write_jsonl(&dir.join("examples.jsonl"), corpus.examples())?;
    write_jsonl(&dir.join("outputs.jsonl"), corpus.outputs())?;
    write_jsonl(
        &dir.join("acu_annotations.jsonl"),
        corpus.match_annotations(),
    )?;
    write_jsonl(
        &dir.join("likert_annotations.jsonl"),
        corpus.likert_annotations(),
    )?;
    if !corpus.external_metric_scores().is_empty() {
        let metrics_dir = dir.join("metrics");
        std::fs::create_dir_all(&metrics_dir).map_err(|e| io_err(&metrics_dir, e))?;
        for (name, matrix) in corpus.external_metric_scores() {
            write_matrix_csv(&metrics_dir.join(format!("{name}.csv")), matrix, &[])?;
        }
    }
    Ok(())
}

fn validate_example(ex: &Example) -> Result<(), String> {
    if ex.example_id.is_empty() {
        return Err("empty example_id".into());
    }
    if ex.reference.trim().is_empty() {
        return Err(format!("example '{}' has an empty reference", ex.example_id));
    }
    let mut seen = std::collections::HashSet::new();
    for acu in &ex.acus {
        if acu.text.is_empty() {
            return Err(format!("acu '{}' has empty text", acu.acu_id));
        }
        if !seen.insert(acu.acu_id.as_str()) {
            return Err(format!("duplicate acu_id '{}'", acu.acu_id));
        }
    }
    Ok(())
}

fn validate_match_record(
    ann: &MatchAnnotation,
    output_keys: &std::collections::HashSet<(String, String)>,
    acus_by_example: &std::collections::HashMap<&str, Vec<&str>>,
    path: &Path,
    line_no: usize,
) -> Result<(), CorpusError> {
    let acus = match acus_by_example.get(ann.example_id.as_str()) {
        Some(acus) => acus,
        None => {
            return Err(CorpusError::DanglingReference {
                context: format!("{}:{}", path.display(), line_no),
                reference: format!("example '{}'", ann.example_id),
            })
        }
    };
    if !output_keys.contains(&(ann.system.clone(), ann.example_id.clone())) {
        return Err(CorpusError::DanglingReference {
            context: format!("{}:{}", path.display(), line_no),
            reference: format!("output ({}, {})", ann.system, ann.example_id),
        });
    }
    for (acu_id, &label) in &ann.labels {
        if label > 1 {
            return Err(malformed(
                path,
                line_no,
                format!("label {label} for acu '{acu_id}' is not binary"),
            ));
        }
        if !acus.contains(&acu_id.as_str()) {
            return Err(CorpusError::DanglingReference {
                context: format!("{}:{}", path.display(), line_no),
                reference: format!("acu '{}' in example '{}'", acu_id, ann.example_id),
            });
        }
    }
    for acu_id in acus {
        if !ann.labels.contains_key(*acu_id) {
            return Err(malformed(
                path,
                line_no,
                format!("labels do not cover acu '{acu_id}'"),
            ));
        }
    }
    Ok(())
}

fn malformed(path: &Path, line: usize, reason: String) -> CorpusError {
    CorpusError::MalformedRecord {
        file: path.display().to_string(),
        line,
        reason,
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// A record parsed from one line, or the parse error, with its 1-based
/// line number.
type NumberedRecord<T> = (usize, Result<T, String>);

/// Yields every non-blank line's parse outcome in file order.
fn read_jsonl<T: serde::de::DeserializeOwned>(
    path: &Path,
) -> Result<Vec<NumberedRecord<T>>, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push((
            idx + 1,
            serde_json::from_str::<T>(&line).map_err(|e| e.to_string()),
        ));
    }
    Ok(records)
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CorpusError> {
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(file, "{line}").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// Reads a score-matrix CSV: header `example_id,<system>,...`, one numeric
/// row per example. Lines starting with `#` (metadata emitted by the CLI)
/// are ignored.
pub fn read_matrix_csv(path: &Path) -> Result<ScoreMatrix, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| malformed(path, 1, e.to_string()))?
        .clone();
    if headers.is_empty() || headers.get(0) != Some("example_id") {
        return Err(malformed(
            path,
            1,
            "matrix CSV header must start with 'example_id'".into(),
        ));
    }
    let systems: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if systems.is_empty() {
        return Err(malformed(path, 1, "matrix CSV has no system columns".into()));
    }
    let mut example_ids = Vec::new();
    let mut values = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line_no = idx + 2;
        let row = row.map_err(|e| malformed(path, line_no, e.to_string()))?;
        if row.len() != systems.len() + 1 {
            return Err(malformed(
                path,
                line_no,
                format!("expected {} fields, got {}", systems.len() + 1, row.len()),
            ));
        }
        example_ids.push(row[0].to_string());
        for field in row.iter().skip(1) {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|e| malformed(path, line_no, format!("bad number '{field}': {e}")))?;
            values.push(value);
        }
    }
    ScoreMatrix::new(example_ids, systems, values)
}

/// Writes a score matrix in the external-metric CSV format. `metadata` lines
/// are emitted first as `# key=value` comments so that readers (including
/// `read_matrix_csv`) skip them.
pub fn write_matrix_csv(
    path: &Path,
    matrix: &ScoreMatrix,
    metadata: &[(String, String)],
) -> Result<(), CorpusError> {
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    for (key, value) in metadata {
        writeln!(file, "# {key}={value}").map_err(|e| io_err(path, e))?;
    }
    let mut writer = csv::Writer::from_writer(file);
    let mut header = vec!["example_id".to_string()];
    header.extend(matrix.systems().iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| malformed(path, 0, e.to_string()))?;
    for (i, id) in matrix.example_ids().iter().enumerate() {
        let mut record = vec![id.clone()];
        record.extend(matrix.row(i).iter().map(|v| format_float(*v)));
        writer
            .write_record(&record)
            .map_err(|e| malformed(path, 0, e.to_string()))?;
    }
    writer.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Shortest decimal form that round-trips through f64 (Display guarantees this).
pub fn format_float(v: f64) -> String {
    format!("{v}")
}

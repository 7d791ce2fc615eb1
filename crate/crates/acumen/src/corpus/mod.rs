//! Data model for annotation benchmarks: examples with their atomic content
//! units, system outputs, human annotations, and dense score matrices.
//!
//! A [`Corpus`] is immutable once constructed and validated, so it can be
//! shared read-only across worker threads.

mod io;

pub use io::{
    benchmark_dir_paths, load_benchmark, read_matrix_csv, save_benchmark, write_matrix_csv,
    LoadOptions, LoadPaths, LoadReport,
};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}: malformed record: {reason}")]
    MalformedRecord {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("dangling reference in {context}: {reference}")]
    DanglingReference { context: String, reference: String },
    #[error("duplicate key in {context}: {key}")]
    DuplicateKey { context: String, key: String },
    #[error("incomplete grid: no score for example '{example_id}', system '{system}'")]
    IncompleteGrid { example_id: String, system: String },
    #[error("empty matrix: {0}")]
    EmptyMatrix(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One atomic content unit: a single fact from a reference summary plus the
/// minimal context needed to judge its presence in a candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acu {
    pub acu_id: String,
    pub text: String,
}

/// A benchmark example: reference summary, its ACU set, and optionally the
/// source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub example_id: String,
    pub reference: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default)]
    pub acus: Vec<Acu>,
}

impl Example {
    pub fn acu(&self, acu_id: &str) -> Option<&Acu> {
        self.acus.iter().find(|a| a.acu_id == acu_id)
    }
}

/// A candidate summary produced by one system for one example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemOutput {
    pub system: String,
    pub example_id: String,
    pub summary: String,
}

/// One worker's binary presence labels over the full ACU set of an example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchAnnotation {
    pub example_id: String,
    pub system: String,
    pub worker_id: String,
    /// acu_id -> 0 (absent) | 1 (present); must cover every ACU of the example.
    pub labels: BTreeMap<String, u8>,
}

/// Annotation protocol for 1-5 Likert judgments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Prior,
    RefFree,
    RefBased,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Protocol::Prior => "prior",
            Protocol::RefFree => "ref_free",
            Protocol::RefBased => "ref_based",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prior" => Ok(Protocol::Prior),
            "ref_free" => Ok(Protocol::RefFree),
            "ref_based" => Ok(Protocol::RefBased),
            other => Err(format!(
                "unknown protocol '{other}' (expected prior, ref_free, or ref_based)"
            )),
        }
    }
}

/// One worker's 1-5 rating of a summary under a given protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertAnnotation {
    pub example_id: String,
    pub system: String,
    pub worker_id: String,
    pub protocol: Protocol,
    pub score: u8,
}

/// Dense n-example x m-system score grid, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    example_ids: Vec<String>,
    systems: Vec<String>,
    values: Vec<f64>,
}

impl ScoreMatrix {
    /// Builds a matrix from row-major values. The value slice length must be
    /// `example_ids.len() * systems.len()`.
    pub fn new(
        example_ids: Vec<String>,
        systems: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self, CorpusError> {
        if example_ids.is_empty() || systems.is_empty() {
            return Err(CorpusError::EmptyMatrix(
                "matrix needs at least one example and one system".into(),
            ));
        }
        if values.len() != example_ids.len() * systems.len() {
            return Err(CorpusError::EmptyMatrix(format!(
                "expected {} values, got {}",
                example_ids.len() * systems.len(),
                values.len()
            )));
        }
        check_unique(example_ids.iter(), "matrix example_ids")?;
        check_unique(systems.iter(), "matrix systems")?;
        Ok(ScoreMatrix {
            example_ids,
            systems,
            values,
        })
    }

    pub fn n_examples(&self) -> usize {
        self.example_ids.len()
    }

    pub fn n_systems(&self) -> usize {
        self.systems.len()
    }

    pub fn example_ids(&self) -> &[String] {
        &self.example_ids
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.systems.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let m = self.systems.len();
        &self.values[row * m..(row + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.systems.len())
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.example_ids.len())
            .map(|i| self.get(i, col))
            .collect()
    }

    /// Per-system means across examples (the aggregated system scores).
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.example_ids.len() as f64;
        let mut sums = vec![0.0; self.systems.len()];
        for row in self.rows() {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums.iter_mut().for_each(|s| *s /= n);
        sums
    }

    pub fn system_index(&self, system: &str) -> Option<usize> {
        self.systems.iter().position(|s| s == system)
    }

    pub fn example_index(&self, example_id: &str) -> Option<usize> {
        self.example_ids.iter().position(|e| e == example_id)
    }

    /// True when both matrices share example ids and systems in the same order.
    pub fn keys_match(&self, other: &ScoreMatrix) -> bool {
        self.example_ids == other.example_ids && self.systems == other.systems
    }

    /// Copies the selected example rows (by index, repeats allowed) into a new
    /// matrix with synthetic row ids. Used by row-resampling statistics.
    pub fn select_rows(&self, indices: &[usize]) -> ScoreMatrix {
        let m = self.systems.len();
        let mut values = Vec::with_capacity(indices.len() * m);
        let mut ids = Vec::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            values.extend_from_slice(self.row(i));
            ids.push(format!("r{k}"));
        }
        ScoreMatrix {
            example_ids: ids,
            systems: self.systems.clone(),
            values,
        }
    }
}

fn check_unique<'a>(
    keys: impl Iterator<Item = &'a String>,
    context: &str,
) -> Result<(), CorpusError> {
    let mut seen = std::collections::HashSet::new();
    for k in keys {
        if !seen.insert(k) {
            return Err(CorpusError::DuplicateKey {
                context: context.to_string(),
                key: k.clone(),
            });
        }
    }
    Ok(())
}

/// The validated, immutable collection every other module consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    examples: Vec<Example>,
    outputs: Vec<SystemOutput>,
    match_annotations: Vec<MatchAnnotation>,
    likert_annotations: Vec<LikertAnnotation>,
    external_metric_scores: BTreeMap<String, ScoreMatrix>,
    example_index: HashMap<String, usize>,
    output_index: HashMap<(String, String), usize>,
    match_index: HashMap<(String, String), Vec<usize>>,
}

impl Corpus {
    /// Validates referential integrity and builds lookup indices.
    ///
    /// Every output must point at a known example; every annotation must point
    /// at a known (example, system) output; match labels must cover exactly
    /// the example's ACU set.
    pub fn from_parts(
        examples: Vec<Example>,
        outputs: Vec<SystemOutput>,
        match_annotations: Vec<MatchAnnotation>,
        likert_annotations: Vec<LikertAnnotation>,
        external_metric_scores: BTreeMap<String, ScoreMatrix>,
    ) -> Result<Self, CorpusError> {
        let mut example_index = HashMap::new();
        for (i, ex) in examples.iter().enumerate() {
            if ex.reference.trim().is_empty() {
                return Err(CorpusError::MalformedRecord {
                    file: "<memory>".into(),
                    line: 0,
                    reason: format!("example '{}' has an empty reference", ex.example_id),
                });
            }
            check_unique(ex.acus.iter().map(|a| &a.acu_id), "acu_id within example")?;
            if let Some(acu) = ex.acus.iter().find(|a| a.text.is_empty()) {
                return Err(CorpusError::MalformedRecord {
                    file: "<memory>".into(),
                    line: 0,
                    reason: format!("acu '{}' has empty text", acu.acu_id),
                });
            }
            if example_index.insert(ex.example_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateKey {
                    context: "examples".into(),
                    key: ex.example_id.clone(),
                });
            }
        }

        let mut output_index = HashMap::new();
        for (i, out) in outputs.iter().enumerate() {
            if !example_index.contains_key(&out.example_id) {
                return Err(CorpusError::DanglingReference {
                    context: "outputs".into(),
                    reference: format!("example '{}'", out.example_id),
                });
            }
            let key = (out.system.clone(), out.example_id.clone());
            if output_index.insert(key, i).is_some() {
                return Err(CorpusError::DuplicateKey {
                    context: "outputs".into(),
                    key: format!("({}, {})", out.system, out.example_id),
                });
            }
        }

        let mut match_index: HashMap<(String, String), Vec<usize>> = HashMap::new();
        let mut seen_match = std::collections::HashSet::new();
        for (i, ann) in match_annotations.iter().enumerate() {
            validate_match_annotation(ann, &examples, &example_index, &output_index)?;
            let worker_key = (
                ann.example_id.clone(),
                ann.system.clone(),
                ann.worker_id.clone(),
            );
            if !seen_match.insert(worker_key) {
                return Err(CorpusError::DuplicateKey {
                    context: "match annotations".into(),
                    key: format!("({}, {}, {})", ann.example_id, ann.system, ann.worker_id),
                });
            }
            match_index
                .entry((ann.example_id.clone(), ann.system.clone()))
                .or_default()
                .push(i);
        }

        let mut seen_likert = std::collections::HashSet::new();
        for ann in &likert_annotations {
            if !(1..=5).contains(&ann.score) {
                return Err(CorpusError::MalformedRecord {
                    file: "<memory>".into(),
                    line: 0,
                    reason: format!("likert score {} outside 1..=5", ann.score),
                });
            }
            let key = (ann.system.clone(), ann.example_id.clone());
            if !output_index.contains_key(&key) {
                return Err(CorpusError::DanglingReference {
                    context: "likert annotations".into(),
                    reference: format!("output ({}, {})", ann.system, ann.example_id),
                });
            }
            let worker_key = (
                ann.example_id.clone(),
                ann.system.clone(),
                ann.worker_id.clone(),
                ann.protocol,
            );
            if !seen_likert.insert(worker_key) {
                return Err(CorpusError::DuplicateKey {
                    context: "likert annotations".into(),
                    key: format!(
                        "({}, {}, {}, {})",
                        ann.example_id, ann.system, ann.worker_id, ann.protocol
                    ),
                });
            }
        }

        for (name, matrix) in &external_metric_scores {
            for id in matrix.example_ids() {
                if !example_index.contains_key(id) {
                    return Err(CorpusError::DanglingReference {
                        context: format!("metric '{name}'"),
                        reference: format!("example '{id}'"),
                    });
                }
            }
        }

        Ok(Corpus {
            examples,
            outputs,
            match_annotations,
            likert_annotations,
            external_metric_scores,
            example_index,
            output_index,
            match_index,
        })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn outputs(&self) -> &[SystemOutput] {
        &self.outputs
    }

    pub fn match_annotations(&self) -> &[MatchAnnotation] {
        &self.match_annotations
    }

    pub fn likert_annotations(&self) -> &[LikertAnnotation] {
        &self.likert_annotations
    }

    pub fn external_metric_scores(&self) -> &BTreeMap<String, ScoreMatrix> {
        &self.external_metric_scores
    }

    pub fn example(&self, example_id: &str) -> Option<&Example> {
        self.example_index.get(example_id).map(|&i| &self.examples[i])
    }

    pub fn output(&self, system: &str, example_id: &str) -> Option<&SystemOutput> {
        self.output_index
            .get(&(system.to_string(), example_id.to_string()))
            .map(|&i| &self.outputs[i])
    }

    /// All match annotations for one (example, system) cell, in load order.
    pub fn matches_for(&self, example_id: &str, system: &str) -> Vec<&MatchAnnotation> {
        self.match_index
            .get(&(example_id.to_string(), system.to_string()))
            .map(|ids| ids.iter().map(|&i| &self.match_annotations[i]).collect())
            .unwrap_or_default()
    }

    /// Distinct system names, in first-appearance order over the outputs.
    pub fn system_names(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        let mut names = Vec::new();
        for out in &self.outputs {
            if seen.insert(out.system.as_str()) {
                names.push(out.system.clone());
            }
        }
        names
    }

    /// Example ids in load order.
    pub fn example_ids(&self) -> Vec<String> {
        self.examples.iter().map(|e| e.example_id.clone()).collect()
    }

    /// Example ids that have at least one match annotation for every listed system.
    pub fn annotated_example_ids(&self, systems: &[String]) -> Vec<String> {
        self.examples
            .iter()
            .filter(|ex| {
                systems.iter().all(|sys| {
                    self.match_index
                        .contains_key(&(ex.example_id.clone(), sys.clone()))
                })
            })
            .map(|e| e.example_id.clone())
            .collect()
    }
}

fn validate_match_annotation(
    ann: &MatchAnnotation,
    examples: &[Example],
    example_index: &HashMap<String, usize>,
    output_index: &HashMap<(String, String), usize>,
) -> Result<(), CorpusError> {
    let ex = match example_index.get(&ann.example_id) {
        Some(&i) => &examples[i],
        None => {
            return Err(CorpusError::DanglingReference {
                context: "match annotations".into(),
                reference: format!("example '{}'", ann.example_id),
            })
        }
    };
    let out_key = (ann.system.clone(), ann.example_id.clone());
    if !output_index.contains_key(&out_key) {
        return Err(CorpusError::DanglingReference {
            context: "match annotations".into(),
            reference: format!("output ({}, {})", ann.system, ann.example_id),
        });
    }
    for (acu_id, &label) in &ann.labels {
        if label > 1 {
            return Err(CorpusError::MalformedRecord {
                file: "<memory>".into(),
                line: 0,
                reason: format!("label {label} for acu '{acu_id}' is not binary"),
            });
        }
        if ex.acu(acu_id).is_none() {
            return Err(CorpusError::DanglingReference {
                context: "match annotations".into(),
                reference: format!("acu '{}' in example '{}'", acu_id, ann.example_id),
            });
        }
    }
    for acu in &ex.acus {
        if !ann.labels.contains_key(&acu.acu_id) {
            return Err(CorpusError::MalformedRecord {
                file: "<memory>".into(),
                line: 0,
                reason: format!(
                    "annotation by '{}' on ({}, {}) does not label acu '{}'",
                    ann.worker_id, ann.example_id, ann.system, acu.acu_id
                ),
            });
        }
    }
    Ok(())
}

/// Number of whitespace-delimited tokens in the raw (untokenized) string.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Fills a dense matrix by calling `scorer` on every requested
/// (example, system) cell, in the requested row/column order.
pub fn build_score_matrix<F>(
    corpus: &Corpus,
    mut scorer: F,
    systems: &[String],
    examples: &[String],
) -> Result<ScoreMatrix, CorpusError>
where
    F: FnMut(&Example, &SystemOutput) -> Option<f64>,
{
    let mut values = Vec::with_capacity(examples.len() * systems.len());
    for example_id in examples {
        let ex = corpus
            .example(example_id)
            .ok_or_else(|| CorpusError::DanglingReference {
                context: "build_score_matrix".into(),
                reference: format!("example '{example_id}'"),
            })?;
        for system in systems {
            let missing = || CorpusError::IncompleteGrid {
                example_id: example_id.clone(),
                system: system.clone(),
            };
            let out = corpus.output(system, example_id).ok_or_else(missing)?;
            values.push(scorer(ex, out).ok_or_else(missing)?);
        }
    }
    ScoreMatrix::new(examples.to_vec(), systems.to_vec(), values)
}

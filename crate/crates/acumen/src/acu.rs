//! Atomic-content-unit scoring: majority aggregation of worker labels, the
//! matched-fraction score, its length-normalized variant, and grid
//! calibration of the normalization strength.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::correlate::{summary_level, CorrError, CorrKind};
use crate::corpus::{word_count, Corpus, CorpusError, MatchAnnotation, ScoreMatrix};

#[derive(Debug, Error)]
pub enum AcuError {
    #[error("no annotations to aggregate")]
    NoAnnotations,
    #[error("annotations disagree on what they label: {0}")]
    InconsistentCoverage(String),
    #[error("example has no content units to match")]
    EmptyAcuSet,
    #[error("normalization strength must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("reference length must be at least one word")]
    ZeroReferenceLength,
    #[error("candidate lengths carry no signal: every example's summaries have equal length")]
    DegenerateLengths,
    #[error("need at least {needed} annotated {unit}, found {found}")]
    InsufficientData {
        needed: usize,
        found: usize,
        unit: &'static str,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Consensus of one or more workers on a single (example, system) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchDecision {
    pub example_id: String,
    pub system: String,
    pub matched_acu_ids: BTreeSet<String>,
    pub total_acus: usize,
}

/// Per-ACU strict majority vote over the workers. A single annotation passes
/// through unchanged; a tie (possible with an even worker count) resolves to
/// unmatched.
pub fn aggregate_matches(annotations: &[&MatchAnnotation]) -> Result<MatchDecision, AcuError> {
    let first = *annotations.first().ok_or(AcuError::NoAnnotations)?;
    for ann in &annotations[1..] {
        if ann.example_id != first.example_id || ann.system != first.system {
            return Err(AcuError::InconsistentCoverage(format!(
                "({}, {}) mixed with ({}, {})",
                first.example_id, first.system, ann.example_id, ann.system
            )));
        }
        if ann.labels.len() != first.labels.len()
            || !ann.labels.keys().eq(first.labels.keys())
        {
            return Err(AcuError::InconsistentCoverage(format!(
                "workers '{}' and '{}' labeled different content units",
                first.worker_id, ann.worker_id
            )));
        }
    }
    let mut matched = BTreeSet::new();
    for acu_id in first.labels.keys() {
        let yes = annotations
            .iter()
            .filter(|ann| ann.labels[acu_id] == 1)
            .count();
        if yes * 2 > annotations.len() {
            matched.insert(acu_id.clone());
        }
    }
    Ok(MatchDecision {
        example_id: first.example_id.clone(),
        system: first.system.clone(),
        matched_acu_ids: matched,
        total_acus: first.labels.len(),
    })
}

/// Matched fraction of the example's content units.
pub fn acu_score(decision: &MatchDecision) -> Result<f64, AcuError> {
    if decision.total_acus == 0 {
        return Err(AcuError::EmptyAcuSet);
    }
    Ok(decision.matched_acu_ids.len() as f64 / decision.total_acus as f64)
}

/// Applies the length penalty e^{min(0, (1 - cand/ref)/alpha)} to a raw
/// score. Candidates no longer than the reference are untouched; beyond
/// that the score decays exponentially, more slowly for larger alpha.
pub fn normalized_acu_score(
    f: f64,
    cand_len: usize,
    ref_len: usize,
    alpha: f64,
) -> Result<f64, AcuError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(AcuError::InvalidAlpha(alpha));
    }
    if ref_len == 0 {
        return Err(AcuError::ZeroReferenceLength);
    }
    let exponent = ((1.0 - cand_len as f64 / ref_len as f64) / alpha).min(0.0);
    Ok(exponent.exp() * f)
}

/// One scored grid cell: raw matched fraction plus the word counts the
/// normalization needs.
#[derive(Debug, Clone, Copy)]
struct Cell {
    f: f64,
    cand_len: usize,
    ref_len: usize,
}

/// Systems and examples that form a complete annotated grid, with one
/// aggregated score per cell (row-major over examples x systems).
struct AnnotatedGrid {
    systems: Vec<String>,
    example_ids: Vec<String>,
    cells: Vec<Cell>,
}

fn annotated_grid(corpus: &Corpus) -> Result<AnnotatedGrid, AcuError> {
    let systems: Vec<String> = {
        let annotated: std::collections::HashSet<&str> = corpus
            .match_annotations()
            .iter()
            .map(|a| a.system.as_str())
            .collect();
        corpus
            .system_names()
            .into_iter()
            .filter(|s| annotated.contains(s.as_str()))
            .collect()
    };
    let example_ids: Vec<String> = corpus
        .annotated_example_ids(&systems)
        .into_iter()
        .filter(|id| !corpus.example(id).expect("listed id exists").acus.is_empty())
        .collect();
    if systems.len() < 2 {
        return Err(AcuError::InsufficientData {
            needed: 2,
            found: systems.len(),
            unit: "systems",
        });
    }
    if example_ids.len() < 2 {
        return Err(AcuError::InsufficientData {
            needed: 2,
            found: example_ids.len(),
            unit: "examples",
        });
    }
    let mut cells = Vec::with_capacity(example_ids.len() * systems.len());
    for example_id in &example_ids {
        let example = corpus.example(example_id).expect("listed id exists");
        let ref_len = word_count(&example.reference);
        for system in &systems {
            let annotations = corpus.matches_for(example_id, system);
            let decision = aggregate_matches(&annotations)?;
            let output = corpus
                .output(system, example_id)
                .expect("annotation implies output");
            cells.push(Cell {
                f: acu_score(&decision)?,
                cand_len: word_count(&output.summary),
                ref_len,
            });
        }
    }
    Ok(AnnotatedGrid {
        systems,
        example_ids,
        cells,
    })
}

impl AnnotatedGrid {
    fn score_values(&self, alpha: Option<f64>) -> Result<Vec<f64>, AcuError> {
        self.cells
            .iter()
            .map(|c| match alpha {
                Some(a) => normalized_acu_score(c.f, c.cand_len, c.ref_len, a),
                None => Ok(c.f),
            })
            .collect()
    }

    fn length_values(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.cand_len as f64).collect()
    }

    fn to_matrix(&self, values: Vec<f64>) -> Result<ScoreMatrix, AcuError> {
        Ok(ScoreMatrix::new(
            self.example_ids.clone(),
            self.systems.clone(),
            values,
        )?)
    }
}

/// Dense matrix of aggregated ACU scores over every fully annotated
/// (example, system) cell. `alpha` switches on length normalization.
pub fn score_matrix(corpus: &Corpus, alpha: Option<f64>) -> Result<ScoreMatrix, AcuError> {
    let grid = annotated_grid(corpus)?;
    let values = grid.score_values(alpha)?;
    grid.to_matrix(values)
}

/// Outcome of the grid search: the strength whose normalized scores are
/// least correlated with candidate length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub alpha: f64,
    /// Signed summary-level Pearson correlation at the chosen alpha.
    pub residual_correlation: f64,
    /// Every (alpha, correlation) pair evaluated, in grid order.
    pub grid: Vec<(f64, f64)>,
}

/// Grid-searches the normalization strength, minimizing the absolute
/// summary-level Pearson correlation between normalized scores and candidate
/// word counts. Ties go to the earliest grid point.
pub fn calibrate_alpha(corpus: &Corpus, grid: &[f64]) -> Result<CalibrationResult, AcuError> {
    if grid.is_empty() {
        return Err(AcuError::InsufficientData {
            needed: 1,
            found: 0,
            unit: "grid points",
        });
    }
    let annotated = annotated_grid(corpus)?;
    let lengths = annotated.to_matrix(annotated.length_values())?;
    let mut evaluated = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let scores = annotated.to_matrix(annotated.score_values(Some(alpha))?)?;
        let corr = match summary_level(&scores, &lengths, CorrKind::Pearson) {
            Ok(s) => s.value,
            Err(CorrError::AllRowsDegenerate) => return Err(AcuError::DegenerateLengths),
            Err(other) => unreachable!("matrices share keys by construction: {other}"),
        };
        evaluated.push((alpha, corr));
    }
    let best = evaluated
        .iter()
        .copied()
        .reduce(|best, next| if next.1.abs() < best.1.abs() { next } else { best })
        .expect("grid is non-empty");
    Ok(CalibrationResult {
        alpha: best.0,
        residual_correlation: best.1,
        grid: evaluated,
    })
}

/// 25 logarithmically spaced strengths spanning [0.25, 10], with the nearest
/// points snapped to 0.5, 2, and 5 exactly.
pub fn default_alpha_grid() -> Vec<f64> {
    const POINTS: usize = 25;
    let (lo, hi) = (0.25f64.ln(), 10.0f64.ln());
    let mut grid: Vec<f64> = (0..POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (POINTS - 1) as f64).exp())
        .collect();
    for anchor in [0.5, 2.0, 5.0] {
        let nearest = (0..POINTS)
            .min_by(|&a, &b| {
                (grid[a] - anchor)
                    .abs()
                    .total_cmp(&(grid[b] - anchor).abs())
            })
            .expect("grid is non-empty");
        grid[nearest] = anchor;
    }
    grid
}

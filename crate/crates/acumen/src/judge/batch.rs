//! Corpus-scale judging: every (example, system) cell scored through the
//! cache, with bounded concurrent dispatch and deterministic assembly.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusError, ScoreMatrix};

use super::cache::JudgeCache;
use super::client::{render_geval_prompt, render_gptscore_prompt, JudgeClient};
use super::{cache_key, CellFailure, JudgeConfig, JudgeError};

/// Which judge to run over the corpus. The evaluator pins the sampling mode:
/// probability and greedy-rating judges are deterministic (temperature 0,
/// one sample), the sampled-rating judge averages five replies at
/// temperature 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluator {
    GptScore,
    GevalGreedy,
    GevalSampled,
}

impl Evaluator {
    fn apply_mode(self, cfg: &mut JudgeConfig) {
        match self {
            Evaluator::GptScore | Evaluator::GevalGreedy => {
                cfg.temperature = 0.0;
                cfg.samples = 1;
            }
            Evaluator::GevalSampled => {
                cfg.temperature = 1.0;
                cfg.samples = 5;
            }
        }
    }
}

impl std::fmt::Display for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Evaluator::GptScore => "gptscore",
            Evaluator::GevalGreedy => "geval_greedy",
            Evaluator::GevalSampled => "geval_sampled",
        })
    }
}

impl std::str::FromStr for Evaluator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gptscore" => Ok(Evaluator::GptScore),
            "geval_greedy" => Ok(Evaluator::GevalGreedy),
            "geval_sampled" => Ok(Evaluator::GevalSampled),
            other => Err(format!(
                "unknown evaluator '{other}' (expected gptscore, geval_greedy, or geval_sampled)"
            )),
        }
    }
}

struct Cell<'a> {
    example_id: &'a str,
    system: &'a str,
    reference: &'a str,
    candidate: &'a str,
}

/// Scores every (example, system) pair in the corpus with the chosen judge
/// and returns the dense matrix.
///
/// Results are cached under the configured directory, so rerunning an
/// identical batch makes no network calls and an interrupted batch resumes
/// where it stopped. At most `cfg.max_inflight` requests run concurrently.
/// If any cell remains unscorable after retries the whole batch fails with
/// the list of failed cells.
pub fn run_judge_batch(
    corpus: &Corpus,
    evaluator: Evaluator,
    cfg: &JudgeConfig,
) -> Result<ScoreMatrix, JudgeError> {
    let mut cfg = cfg.clone();
    evaluator.apply_mode(&mut cfg);
    cfg.validate()?;

    let systems = corpus.system_names();
    let example_ids = corpus.example_ids();
    if systems.is_empty() || example_ids.is_empty() {
        return Err(JudgeError::InvalidConfig(
            "corpus has no system outputs to judge".into(),
        ));
    }
    let mut cells = Vec::with_capacity(example_ids.len() * systems.len());
    for example_id in &example_ids {
        let example = corpus.example(example_id).expect("listed ids resolve");
        for system in &systems {
            let output = corpus.output(system, example_id).ok_or_else(|| {
                CorpusError::IncompleteGrid {
                    example_id: example_id.clone(),
                    system: system.clone(),
                }
            })?;
            cells.push(Cell {
                example_id,
                system,
                reference: &example.reference,
                candidate: &output.summary,
            });
        }
    }

    let client = JudgeClient::new(cfg.clone())?;
    let cache = JudgeCache::new(cfg.cache_dir.clone());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<f64, JudgeError>>>> =
        cells.iter().map(|_| Mutex::new(None)).collect();

    thread::scope(|scope| {
        for _ in 0..cfg.max_inflight.min(cells.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(cell) = cells.get(i) else { break };
                let outcome =
                    score_cell(&client, &cache, evaluator, &cfg, cell.reference, cell.candidate);
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut values = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (cell, slot) in cells.iter().zip(&slots) {
        match slot.lock().unwrap().take().expect("all cells were claimed") {
            Ok(score) => values.push(score),
            Err(e) => failures.push(CellFailure {
                example_id: cell.example_id.to_string(),
                system: cell.system.to_string(),
                reason: e.to_string(),
            }),
        }
    }
    if !failures.is_empty() {
        return Err(JudgeError::Batch(failures));
    }
    Ok(ScoreMatrix::new(example_ids, systems, values)?)
}

/// Cache-through score for one cell: the mean over sample indices.
fn score_cell(
    client: &JudgeClient,
    cache: &JudgeCache,
    evaluator: Evaluator,
    cfg: &JudgeConfig,
    reference: &str,
    candidate: &str,
) -> Result<f64, JudgeError> {
    let prompt = match evaluator {
        Evaluator::GptScore => render_gptscore_prompt(reference, candidate),
        Evaluator::GevalGreedy | Evaluator::GevalSampled => {
            render_geval_prompt(reference, candidate)
        }
    };
    let mut total = 0.0;
    for sample_index in 0..cfg.samples {
        let key = cache_key(&cfg.model, &prompt, cfg.temperature, sample_index);
        let record = match cache.load(&key) {
            Some(record) => record,
            None => {
                let record = match evaluator {
                    Evaluator::GptScore => client.gptscore_sample(reference, candidate)?,
                    Evaluator::GevalGreedy | Evaluator::GevalSampled => {
                        client.geval_sample(reference, candidate, sample_index)?
                    }
                };
                cache.store(&record)?;
                record
            }
        };
        total += record.parsed_score;
    }
    Ok(total / f64::from(cfg.samples))
}

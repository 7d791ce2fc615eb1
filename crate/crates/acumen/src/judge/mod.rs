//! LLM-judge evaluators and the plumbing to run them at corpus scale.
//!
//! Two scoring modes are provided: a recall probability read off the
//! log-probability of a final "Yes" token, and a 1-5 agreement rating parsed
//! from a chat reply. Every request/response pair is cached on disk keyed by
//! its exact inputs, so interrupted batches resume without repeating work
//! and identical reruns make no network calls at all.

mod batch;
mod cache;
mod client;
#[cfg(test)]
mod stub;

pub use batch::{run_judge_batch, Evaluator};
pub use cache::JudgeCache;
pub use client::{
    geval_recall, gptscore_recall, parse_geval_score, render_geval_prompt,
    render_gptscore_prompt, JudgeClient,
};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::CorpusError;

#[derive(Debug, Error)]
pub enum JudgeError {
    /// The endpoint kept returning 429 through every retry.
    #[error("rate limited by the endpoint after {attempts} attempts")]
    RateLimited { attempts: u32 },
    /// The reply carried no usable log-probability for the echoed prompt.
    #[error("endpoint returned no log-probabilities for the prompt tokens")]
    NoLogprobs,
    /// Connection-level failure, or a server error that survived retries.
    #[error("transport failure: {0}")]
    Transport(String),
    /// Non-retryable HTTP status (bad request, auth failure, ...).
    #[error("endpoint rejected the request with status {0}")]
    BadStatus(u16),
    /// Reply arrived but no 1-5 score could be read from it.
    #[error("no score in 1..=5 found in reply {0:?}")]
    UnparseableScore(String),
    /// Reply arrived but its JSON shape was not the expected protocol.
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    /// Cache file could not be read or written.
    #[error("cache i/o at {path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid judge configuration: {0}")]
    InvalidConfig(String),
    /// One or more cells failed after retries; the matrix was not produced.
    #[error("judge batch failed on {} cell(s); first: {}", .0.len(), .0.first().map_or("unknown", |f| f.reason.as_str()))]
    Batch(Vec<CellFailure>),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// One unrecoverable cell from a batch run, kept so callers can report or
/// retry exactly what failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellFailure {
    pub example_id: String,
    pub system: String,
    pub reason: String,
}

/// Connection and sampling settings for the judge endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JudgeConfig {
    /// Base URL; `/completions` and `/chat/completions` are appended.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key. The key itself
    /// is never stored in configuration or artifacts.
    pub api_key_env: String,
    pub temperature: f64,
    /// Replies requested per cell; scores are averaged.
    pub samples: u32,
    /// Upper bound on concurrent requests during a batch.
    pub max_inflight: usize,
    pub cache_dir: PathBuf,
    /// First retry delay; doubles per attempt. Kept small in tests.
    pub retry_base_ms: u64,
}

impl JudgeConfig {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        cache_dir: impl Into<PathBuf>,
    ) -> Self {
        JudgeConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key_env: "JUDGE_API_KEY".into(),
            temperature: 0.0,
            samples: 1,
            max_inflight: 4,
            cache_dir: cache_dir.into(),
            retry_base_ms: 250,
        }
    }

    pub fn validate(&self) -> Result<(), JudgeError> {
        if self.samples == 0 {
            return Err(JudgeError::InvalidConfig("samples must be positive".into()));
        }
        if self.max_inflight == 0 {
            return Err(JudgeError::InvalidConfig(
                "max_inflight must be positive".into(),
            ));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(JudgeError::InvalidConfig(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        if self.temperature == 0.0 && self.samples != 1 {
            return Err(JudgeError::InvalidConfig(
                "samples must be 1 when temperature is 0 (replies are deterministic)".into(),
            ));
        }
        Ok(())
    }

    /// Reads the API key from the configured environment variable, if set.
    pub fn api_key(&self) -> Option<String> {
        std::env::var(&self.api_key_env).ok()
    }
}

/// One cached judge call: the exact prompt sent, the raw reply, and the
/// score read from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRecord {
    pub cache_key: String,
    pub rendered_prompt: String,
    pub raw_response: String,
    pub parsed_score: f64,
    /// Unix seconds at the time of the call.
    pub timestamp: u64,
}

/// Content address of one judge call. Two calls collide only when model,
/// prompt, temperature, and sample index are all byte-identical (the tuple
/// is JSON-encoded, which is injective, then hashed).
pub fn cache_key(model: &str, prompt: &str, temperature: f64, sample_index: u32) -> String {
    let encoded = serde_json::to_string(&(model, prompt, temperature, sample_index))
        .expect("strings and numbers always encode");
    hex::encode(Sha256::digest(encoded.as_bytes()))
}

pub(crate) fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

//! HTTP client for the two judge protocols, with bounded retries.

use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::{cache_key, unix_now, JudgeConfig, JudgeError, JudgeRecord};

/// Initial attempt plus this many retries on transient failures.
const MAX_RETRIES: u32 = 3;

/// Prompt asking for a yes/no recall judgment, answered with "Yes" so the
/// final token's probability can be read as the score.
pub fn render_gptscore_prompt(reference: &str, candidate: &str) -> String {
    format!(
        "Answer the question based on the following reference summary and candidate summary.\n\
         \n\
         Question: Can all of the information in the reference summary be found in the candidate summary? (a). Yes. (b). No.\n\
         \n\
         Reference Summary: {reference}\n\
         \n\
         Candidate Summary: {candidate}\n\
         \n\
         Answer: Yes"
    )
}

/// Prompt asking for a 1-5 agreement rating of recall coverage.
pub fn render_geval_prompt(reference: &str, candidate: &str) -> String {
    format!(
        "You will receive a reference summary and a candidate summary. Your task is to compare these two summaries and assess the extent to which the candidate summary covers the information presented in the reference summary.\n\
         \n\
         Please indicate your agreement with the following statement:\n\
         \"All of the information in the reference summary can be found in the candidate summary.\"\n\
         \n\
         Use the following 5-point scale when determining your response:\n\
         \n\
         1. Strongly Disagree\n\
         \n\
         2. Disagree\n\
         \n\
         3. Neither Agree nor Disagree\n\
         \n\
         4. Agree\n\
         \n\
         5. Strongly Agree\n\
         \n\
         Input:\n\
         \n\
         Reference Summary:\n\
         \n\
         {reference}\n\
         \n\
         Candidate Summary:\n\
         \n\
         {candidate}\n\
         \n\
         Evaluation Form (scores ONLY):\n\
         \n\
         - Agreement (1-5):"
    )
}

/// First standalone integer in 1..=5 found in the reply. Digit runs touching
/// a hyphen are skipped so scale reminders like "(1-5)" are not mistaken for
/// the score.
pub fn parse_geval_score(text: &str) -> Result<f64, JudgeError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let hyphen_before = start > 0 && bytes[start - 1] == b'-';
            let hyphen_after = i < bytes.len() && bytes[i] == b'-';
            if !hyphen_before && !hyphen_after {
                if let Ok(v) = text[start..i].parse::<u32>() {
                    if (1..=5).contains(&v) {
                        return Ok(f64::from(v));
                    }
                }
            }
        } else {
            i += 1;
        }
    }
    Err(JudgeError::UnparseableScore(text.to_string()))
}

/// Blocking client bound to one endpoint and model.
pub struct JudgeClient {
    cfg: JudgeConfig,
    http: reqwest::blocking::Client,
}

impl JudgeClient {
    pub fn new(cfg: JudgeConfig) -> Result<Self, JudgeError> {
        cfg.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| JudgeError::Transport(e.to_string()))?;
        Ok(JudgeClient { cfg, http })
    }

    pub fn config(&self) -> &JudgeConfig {
        &self.cfg
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.cfg.endpoint.trim_end_matches('/'), path)
    }

    /// POSTs the body, retrying up to [`MAX_RETRIES`] times with exponential
    /// backoff on 429, 5xx, and connection failures. Other statuses fail
    /// immediately.
    fn post_with_retry(&self, url: &str, body: &Value) -> Result<Value, JudgeError> {
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let mut request = self.http.post(url).json(body);
            if let Some(key) = self.cfg.api_key() {
                request = request.bearer_auth(key);
            }
            let failure = match request.send() {
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    if (200..300).contains(&status) {
                        return resp
                            .json::<Value>()
                            .map_err(|e| JudgeError::MalformedResponse(e.to_string()));
                    }
                    if status != 429 && !(500..600).contains(&status) {
                        return Err(JudgeError::BadStatus(status));
                    }
                    status
                }
                Err(e) => {
                    if attempt > MAX_RETRIES {
                        return Err(JudgeError::Transport(e.to_string()));
                    }
                    0
                }
            };
            if attempt > MAX_RETRIES {
                return Err(match failure {
                    429 => JudgeError::RateLimited { attempts: attempt },
                    status => JudgeError::Transport(format!(
                        "server error {status} persisted through {attempt} attempts"
                    )),
                });
            }
            thread::sleep(Duration::from_millis(
                self.cfg.retry_base_ms << (attempt - 1),
            ));
        }
    }

    /// One scored completions call: the probability of the trailing "Yes".
    pub fn gptscore_sample(
        &self,
        reference: &str,
        candidate: &str,
    ) -> Result<JudgeRecord, JudgeError> {
        let prompt = render_gptscore_prompt(reference, candidate);
        let body = json!({
            "model": self.cfg.model,
            "prompt": prompt,
            "temperature": self.cfg.temperature,
            "max_tokens": 0,
            "logprobs": 1,
            "echo": true,
        });
        let reply = self.post_with_retry(&self.url("/completions"), &body)?;
        let logprob = reply["choices"][0]["logprobs"]["token_logprobs"]
            .as_array()
            .and_then(|tokens| tokens.last())
            .and_then(Value::as_f64)
            .ok_or(JudgeError::NoLogprobs)?;
        if logprob > 0.0 {
            return Err(JudgeError::MalformedResponse(format!(
                "log-probability {logprob} is positive"
            )));
        }
        Ok(JudgeRecord {
            cache_key: cache_key(&self.cfg.model, &prompt, self.cfg.temperature, 0),
            rendered_prompt: prompt,
            raw_response: reply.to_string(),
            parsed_score: logprob.exp(),
            timestamp: unix_now(),
        })
    }

    /// One scored chat call: a 1-5 rating parsed from the reply text.
    pub fn geval_sample(
        &self,
        reference: &str,
        candidate: &str,
        sample_index: u32,
    ) -> Result<JudgeRecord, JudgeError> {
        let prompt = render_geval_prompt(reference, candidate);
        let body = json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
        });
        let reply = self.post_with_retry(&self.url("/chat/completions"), &body)?;
        let content = reply["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| {
                JudgeError::MalformedResponse("reply carries no message content".into())
            })?;
        let score = parse_geval_score(content)?;
        Ok(JudgeRecord {
            cache_key: cache_key(&self.cfg.model, &prompt, self.cfg.temperature, sample_index),
            rendered_prompt: prompt,
            raw_response: reply.to_string(),
            parsed_score: score,
            timestamp: unix_now(),
        })
    }
}

/// Recall score in [0, 1]: the model's probability of affirming that all
/// reference information appears in the candidate.
pub fn gptscore_recall(
    reference: &str,
    candidate: &str,
    cfg: &JudgeConfig,
) -> Result<f64, JudgeError> {
    JudgeClient::new(cfg.clone())?
        .gptscore_sample(reference, candidate)
        .map(|r| r.parsed_score)
}

/// Recall rating in [1, 5]: a single greedy reply, or the average over
/// `cfg.samples` sampled replies.
pub fn geval_recall(
    reference: &str,
    candidate: &str,
    cfg: &JudgeConfig,
) -> Result<f64, JudgeError> {
    let client = JudgeClient::new(cfg.clone())?;
    let mut total = 0.0;
    for sample_index in 0..cfg.samples {
        total += client
            .geval_sample(reference, candidate, sample_index)?
            .parsed_score;
    }
    Ok(total / f64::from(cfg.samples))
}

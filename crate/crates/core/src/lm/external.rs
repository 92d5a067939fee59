use super::{LanguageModel, LmScore, ScorerError};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

/// Body of `POST /score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireScore {
    pub log_prob: f64,
    pub token_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub scores: Vec<WireScore>,
}

const REQUEST_ID_HEADER: &str = "x-request-id";

/// Client for an external scoring service.
///
/// One HTTP request per batch, no retries. Each request carries an
/// `x-request-id` header; a response that echoes a different id is rejected.
#[derive(Debug)]
pub struct ExternalScorer {
    url: String,
    agent: ureq::Agent,
    next_id: AtomicU64,
}

impl ExternalScorer {
    /// `endpoint` is either the base address (`http://host:port`) or the full
    /// `/score` URL.
    pub fn new(endpoint: &str, timeout: Duration) -> Self {
        let trimmed = endpoint.trim_end_matches('/');
        let url = if trimmed.ends_with("/score") {
            trimmed.to_string()
        } else {
            format!("{trimmed}/score")
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        ExternalScorer {
            url,
            agent,
            next_id: AtomicU64::new(1),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Scores a batch, preserving input order. An empty batch sends nothing.
    pub fn score_texts(&self, texts: &[&str]) -> Result<Vec<LmScore>, ScorerError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let request_id = self.next_id.fetch_add(1, Ordering::Relaxed).to_string();
        let body = ScoreRequest {
            texts: texts.iter().map(|t| t.to_string()).collect(),
        };
        let mut response = self
            .agent
            .post(&self.url)
            .header(REQUEST_ID_HEADER, &request_id)
            .send_json(&body)
            .map_err(|e| ScorerError::Transport(format!("{}: {e}", self.url)))?;
        let status = response.status();
        if !status.is_success() {
            return Err(ScorerError::Transport(format!("{} returned HTTP {status}", self.url)));
        }
        if let Some(echo) = response.headers().get(REQUEST_ID_HEADER) {
            if echo.as_bytes() != request_id.as_bytes() {
                return Err(ScorerError::Malformed {
                    message: format!("response for request {echo:?}, expected {request_id}"),
                    indices: (0..texts.len()).collect(),
                });
            }
        }
        let parsed: ScoreResponse = response.body_mut().read_json().map_err(|e| ScorerError::Malformed {
            message: e.to_string(),
            indices: (0..texts.len()).collect(),
        })?;
        validate_response(texts.len(), parsed)
    }
}

pub(crate) fn validate_response(expected: usize, response: ScoreResponse) -> Result<Vec<LmScore>, ScorerError> {
    let mut bad: Vec<usize> = response
        .scores
        .iter()
        .enumerate()
        .filter(|(_, s)| !(s.log_prob.is_finite() && s.log_prob <= 0.0 && s.token_count >= 1))
        .map(|(i, _)| i)
        .collect();
    if response.scores.len() != expected {
        bad.extend(response.scores.len().min(expected)..expected.max(response.scores.len()));
        return Err(ScorerError::Malformed {
            message: format!("expected {expected} scores, got {}", response.scores.len()),
            indices: bad,
        });
    }
    if !bad.is_empty() {
        return Err(ScorerError::Malformed {
            message: "scores must have finite log_prob <= 0 and token_count >= 1".into(),
            indices: bad,
        });
    }
    Ok(response
        .scores
        .into_iter()
        .map(|s| LmScore {
            log_prob: s.log_prob,
            token_count: s.token_count,
        })
        .collect())
}

impl LanguageModel for ExternalScorer {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError> {
        Ok(self.score_texts(&[text])?.remove(0))
    }

    fn score_batch(&self, texts: &[&str]) -> Result<Vec<LmScore>, ScorerError> {
        self.score_texts(texts)
    }
}

//! Language-model scoring: a built-in character n-gram model and an HTTP
//! client for external scorers.

mod external;
mod ngram;

pub use external::{ExternalScorer, ScoreRequest, ScoreResponse, WireScore};
pub use ngram::{NgramModel, Symbol, DEFAULT_K, DEFAULT_ORDER, MODEL_FORMAT_VERSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Total natural-log probability of a text and the number of predicted
/// symbols it was accumulated over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmScore {
    pub log_prob: f64,
    pub token_count: u64,
}

impl LmScore {
    pub fn perplexity(&self) -> f64 {
        (-self.log_prob / self.token_count as f64).exp()
    }
}

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("no language model configured (give --lm or --scorer-url)")]
    Unavailable,

    #[error("scorer transport failure: {0}")]
    Transport(String),

    #[error("malformed scorer response: {message} (indices {indices:?})")]
    Malformed { message: String, indices: Vec<usize> },

    #[error("scorer failed on sentence {id}: {message}")]
    Sentence { id: String, message: String },
}

/// Anything that can assign log-probabilities to text. Implementations
/// must be shareable for concurrent read-only queries.
pub trait LanguageModel: Send + Sync {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError>;

    fn score_batch(&self, texts: &[&str]) -> Result<Vec<LmScore>, ScorerError> {
        texts.iter().map(|t| self.score(t)).collect()
    }
}

/// Stand-in used when no model is configured; every query fails.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoModel;

impl LanguageModel for NoModel {
    fn score(&self, _text: &str) -> Result<LmScore, ScorerError> {
        Err(ScorerError::Unavailable)
    }
}

impl<M: LanguageModel + ?Sized> LanguageModel for &M {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError> {
        (**self).score(text)
    }

    fn score_batch(&self, texts: &[&str]) -> Result<Vec<LmScore>, ScorerError> {
        (**self).score_batch(texts)
    }
}

impl<M: LanguageModel + ?Sized> LanguageModel for Box<M> {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError> {
        (**self).score(text)
    }

    fn score_batch(&self, texts: &[&str]) -> Result<Vec<LmScore>, ScorerError> {
        (**self).score_batch(texts)
    }
}

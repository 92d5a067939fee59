use super::report::{Level, MetricReport};
use crate::corpus::Cefr;
use crate::error::{Error, Result};
use crate::lm::{LanguageModel, ScorerError};
use crate::text::{nld, normalize, tokenize};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScribendiConfig {
    /// Minimum string similarity for a change to count as a correction.
    pub similarity_threshold: f64,
}

impl Default for ScribendiConfig {
    fn default() -> Self {
        ScribendiConfig {
            similarity_threshold: 0.8,
        }
    }
}

impl ScribendiConfig {
    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.similarity_threshold) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "similarity threshold must lie in [0, 1], got {}",
                self.similarity_threshold
            )))
        }
    }
}

/// `1 - nld` on the normalized strings.
pub fn levenshtein_ratio(a: &str, b: &str) -> f64 {
    1.0 - nld(&normalize(a), &normalize(b))
}

/// `1 - nld` after sorting each side's tokens alphabetically.
pub fn token_sort_ratio(a: &str, b: &str) -> f64 {
    let sorted = |s: &str| {
        let mut t = tokenize(&normalize(s)).into_tokens();
        t.sort();
        t.join(" ")
    };
    1.0 - nld(&sorted(a), &sorted(b))
}

/// Whether the hypothesis is similar enough to the source to be judged a
/// correction at all.
pub fn passes_similarity_gate(source: &str, hypothesis: &str, cfg: &ScribendiConfig) -> bool {
    levenshtein_ratio(source, hypothesis).max(token_sort_ratio(source, hypothesis))
        >= cfg.similarity_threshold
}

/// Sentence score in {-1, 0, +1}: 0 for an unchanged sentence; +1 when the
/// hypothesis has lower perplexity and passes the similarity gate; else -1.
/// The language model is only queried when the gate passes.
pub fn scribendi_sentence(
    source: &str,
    hypothesis: &str,
    lm: &dyn LanguageModel,
    cfg: &ScribendiConfig,
) -> std::result::Result<i8, ScorerError> {
    if normalize(source) == normalize(hypothesis) {
        return Ok(0);
    }
    if !passes_similarity_gate(source, hypothesis, cfg) {
        return Ok(-1);
    }
    let scores = lm.score_batch(&[source, hypothesis])?;
    if scores.len() != 2 {
        return Err(ScorerError::Malformed {
            message: format!("expected 2 scores, got {}", scores.len()),
            indices: (scores.len()..2).collect(),
        });
    }
    Ok(if scores[1].perplexity() < scores[0].perplexity() {
        1
    } else {
        -1
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScribendiItem {
    pub id: String,
    pub cefr: Cefr,
    pub source: String,
    pub hypothesis: String,
}

/// Per-sentence scores, in input order.
pub fn scribendi_scores(
    items: &[ScribendiItem],
    lm: &dyn LanguageModel,
    cfg: &ScribendiConfig,
) -> Result<Vec<i8>> {
    cfg.validate()?;
    items
        .par_iter()
        .map(|item| {
            scribendi_sentence(&item.source, &item.hypothesis, lm, cfg).map_err(|e| {
                Error::Scorer(ScorerError::Sentence {
                    id: item.id.clone(),
                    message: e.to_string(),
                })
            })
        })
        .collect()
}

/// Mean sentence score over a non-empty corpus.
pub fn scribendi_corpus(items: &[ScribendiItem], lm: &dyn LanguageModel, cfg: &ScribendiConfig) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::Input("Scribendi score needs a non-empty corpus".into()));
    }
    let scores = scribendi_scores(items, lm, cfg)?;
    let sum: i64 = scores.iter().map(|&s| i64::from(s)).sum();
    Ok(sum as f64 / scores.len() as f64)
}

/// Adds one system's Scribendi means (overall and per level) to a report.
pub fn scribendi_report(
    report: &mut MetricReport,
    system: &str,
    items: &[ScribendiItem],
    lm: &dyn LanguageModel,
    cfg: &ScribendiConfig,
) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Input("Scribendi score needs a non-empty corpus".into()));
    }
    let scores = scribendi_scores(items, lm, cfg)?;
    let mean = |pick: &dyn Fn(Cefr) -> bool| {
        let (sum, n) = items
            .iter()
            .zip(&scores)
            .filter(|(it, _)| pick(it.cefr))
            .fold((0i64, 0usize), |(s, n), (_, &v)| (s + i64::from(v), n + 1));
        (n > 0).then(|| sum as f64 / n as f64)
    };
    report.set(system, Level::All, mean(&|_| true));
    for level in [Cefr::A, Cefr::B, Cefr::C, Cefr::Unknown] {
        if items.iter().any(|it| it.cefr == level) {
            report.set(system, Level::Cefr(level), mean(&|c| c == level));
        }
    }
    Ok(())
}

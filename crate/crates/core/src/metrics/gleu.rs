use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::text::TokenSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GleuConfig {
    pub max_n: usize,
    /// Weight of the source-copy penalty.
    pub penalty_weight: f64,
    /// Reference draws averaged over when a sentence has several references.
    pub num_reference_samples: usize,
    pub seed: u64,
}

impl Default for GleuConfig {
    fn default() -> Self {
        GleuConfig {
            max_n: 4,
            penalty_weight: 1.0,
            num_reference_samples: 500,
            seed: 0,
        }
    }
}

impl GleuConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 {
            return Err(Error::Config("GLEU max_n must be at least 1".into()));
        }
        if !(self.penalty_weight.is_finite() && self.penalty_weight >= 0.0) {
            return Err(Error::Config(format!(
                "GLEU penalty weight must be >= 0, got {}",
                self.penalty_weight
            )));
        }
        if self.num_reference_samples == 0 {
            return Err(Error::Config("GLEU needs at least one reference sample".into()));
        }
        Ok(())
    }
}

/// One evaluated sentence. `id` seeds the per-sentence reference draws, so
/// results do not depend on how a corpus is split or ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct GleuSentence {
    pub id: String,
    pub source: TokenSequence,
    pub hypothesis: TokenSequence,
    pub references: Vec<TokenSequence>,
}

/// Pooled n-gram statistics for one reference assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct GleuCounts {
    pub numerators: Vec<f64>,
    pub denominators: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl GleuCounts {
    fn zero(max_n: usize) -> Self {
        GleuCounts {
            numerators: vec![0.0; max_n],
            denominators: vec![0; max_n],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    fn add(&mut self, other: &GleuCounts) {
        for (a, b) in self.numerators.iter_mut().zip(&other.numerators) {
            *a += b;
        }
        for (a, b) in self.denominators.iter_mut().zip(&other.denominators) {
            *a += b;
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Geometric mean of the pooled precisions times the brevity penalty.
    pub fn score(&self) -> f64 {
        let max_n = self.numerators.len();
        if self
            .numerators
            .iter()
            .zip(&self.denominators)
            .any(|(&num, &den)| num <= 0.0 || den == 0)
        {
            return 0.0;
        }
        let log_precision: f64 = self
            .numerators
            .iter()
            .zip(&self.denominators)
            .map(|(&num, &den)| (num / den as f64).ln() / max_n as f64)
            .sum();
        let bp = if self.hyp_len > self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        };
        bp * log_precision.exp()
    }
}

/// Corpus statistics, one [`GleuCounts`] per reference draw. Statistics from
/// disjoint shards merge with [`GleuStats::merge`].
#[derive(Debug, Clone, PartialEq)]
pub struct GleuStats {
    samples: Vec<GleuCounts>,
}

impl GleuStats {
    /// Adds another shard's statistics. A single-sample side comes from a
    /// shard with one reference per sentence and is broadcast over the other
    /// side's draws.
    pub fn merge(&mut self, other: &GleuStats) {
        if self.samples.len() == 1 && other.samples.len() > 1 {
            self.samples = vec![self.samples[0].clone(); other.samples.len()];
        }
        if other.samples.len() == 1 {
            for a in &mut self.samples {
                a.add(&other.samples[0]);
            }
            return;
        }
        assert_eq!(self.samples.len(), other.samples.len(), "sample counts differ");
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            a.add(b);
        }
    }

    /// Mean GLEU over the reference draws.
    pub fn score(&self) -> f64 {
        let sum: f64 = self.samples.iter().map(GleuCounts::score).sum();
        sum / self.samples.len() as f64
    }

    pub fn samples(&self) -> &[GleuCounts] {
        &self.samples
    }
}

type NgramCounts<'a> = HashMap<&'a [String], u64>;

fn ngram_counts(tokens: &[String], n: usize) -> NgramCounts<'_> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for g in tokens.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

/// Statistics of one sentence against one reference.
///
/// For each order n: matches are hypothesis n-grams clipped by reference
/// counts; the penalty counts hypothesis n-grams that occur in the source
/// but nowhere in the reference (clipped by source counts). The numerator
/// `max(0, matches - weight * penalty)` is floored per sentence.
pub fn sentence_counts(
    source: &TokenSequence,
    hypothesis: &TokenSequence,
    reference: &TokenSequence,
    cfg: &GleuConfig,
) -> GleuCounts {
    let (s, h, r) = (source.tokens(), hypothesis.tokens(), reference.tokens());
    let mut counts = GleuCounts::zero(cfg.max_n);
    counts.hyp_len = h.len() as u64;
    counts.ref_len = r.len() as u64;
    for n in 1..=cfg.max_n {
        let hc = ngram_counts(h, n);
        let rc = ngram_counts(r, n);
        let sc = ngram_counts(s, n);
        let mut matches = 0u64;
        let mut penalty = 0u64;
        for (g, &hn) in &hc {
            match rc.get(g) {
                Some(&rn) => matches += hn.min(rn),
                None => penalty += hn.min(sc.get(g).copied().unwrap_or(0)),
            }
        }
        let numerator = matches as f64 - cfg.penalty_weight * penalty as f64;
        counts.numerators[n - 1] = numerator.max(0.0);
        counts.denominators[n - 1] = (h.len() + 1).saturating_sub(n) as u64;
    }
    counts
}

fn reference_draws(sentence: &GleuSentence, cfg: &GleuConfig, samples: usize) -> Vec<usize> {
    if sentence.references.len() == 1 {
        return vec![0; samples];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &sentence.id));
    (0..samples)
        .map(|_| rng.random_range(0..sentence.references.len()))
        .collect()
}

fn validate_sentences(sentences: &[GleuSentence], cfg: &GleuConfig) -> Result<()> {
    cfg.validate()?;
    if let Some(s) = sentences.iter().find(|s| s.references.is_empty()) {
        return Err(Error::Input(format!("sentence {} has no reference", s.id)));
    }
    Ok(())
}

/// Pooled statistics for a (possibly partial) corpus.
pub fn gleu_stats(sentences: &[GleuSentence], cfg: &GleuConfig) -> Result<GleuStats> {
    validate_sentences(sentences, cfg)?;
    let multi = sentences.iter().any(|s| s.references.len() > 1);
    let samples = if multi { cfg.num_reference_samples } else { 1 };
    let per_sentence: Vec<Vec<GleuCounts>> = sentences
        .par_iter()
        .map(|sentence| {
            let by_ref: Vec<GleuCounts> = sentence
                .references
                .iter()
                .map(|r| sentence_counts(&sentence.source, &sentence.hypothesis, r, cfg))
                .collect();
            reference_draws(sentence, cfg, samples)
                .into_iter()
                .map(|i| by_ref[i].clone())
                .collect()
        })
        .collect();
    let mut stats = GleuStats {
        samples: vec![GleuCounts::zero(cfg.max_n); samples],
    };
    // Sequential reduction in corpus order keeps the result independent of
    // the thread count.
    for sentence in &per_sentence {
        for (acc, c) in stats.samples.iter_mut().zip(sentence) {
            acc.add(c);
        }
    }
    Ok(stats)
}

/// Corpus-level GLEU in `[0, 1]`.
pub fn gleu_corpus(sentences: &[GleuSentence], cfg: &GleuConfig) -> Result<f64> {
    if sentences.is_empty() {
        return Err(Error::Input("GLEU needs a non-empty corpus".into()));
    }
    Ok(gleu_stats(sentences, cfg)?.score())
}

/// Convenience form over parallel lists; sentence ids are 1-based line
/// numbers.
pub fn gleu_parallel(
    sources: &[TokenSequence],
    hypotheses: &[TokenSequence],
    references: &[Vec<TokenSequence>],
    cfg: &GleuConfig,
) -> Result<f64> {
    if sources.len() != hypotheses.len() || sources.len() != references.len() {
        return Err(Error::Input(format!(
            "GLEU inputs differ in length: {} sources, {} hypotheses, {} reference lists",
            sources.len(),
            hypotheses.len(),
            references.len()
        )));
    }
    let sentences: Vec<GleuSentence> = sources
        .iter()
        .zip(hypotheses)
        .zip(references)
        .enumerate()
        .map(|(i, ((s, h), r))| GleuSentence {
            id: (i + 1).to_string(),
            source: s.clone(),
            hypothesis: h.clone(),
            references: r.clone(),
        })
        .collect();
    gleu_corpus(&sentences, cfg)
}

//! LM-guided greedy correction: propose local edits, keep the best one while
//! it improves the sentence log-probability by at least a fixed margin.

use crate::corpus::read_to_string;
use crate::error::{Error, Result};
use crate::lm::NgramModel;
use crate::text::{detokenize, normalize, osa_distance, tokenize, Edit, TokenSequence};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

/// Known word forms (lowercase, normalized) with optional frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    words: BTreeMap<String, u64>,
    alphabet: Vec<char>,
}

impl Lexicon {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut words = BTreeMap::new();
        for (word, freq) in entries {
            let w = normalize(word.as_ref()).to_lowercase();
            if w.is_empty() || w.contains(' ') {
                continue;
            }
            *words.entry(w).or_insert(0) += freq;
        }
        if words.is_empty() {
            return Err(Error::Input("lexicon is empty".into()));
        }
        let alphabet: BTreeSet<char> = words.keys().flat_map(|w| w.chars()).collect();
        Ok(Lexicon {
            words,
            alphabet: alphabet.into_iter().collect(),
        })
    }

    pub fn from_words(words: &[&str]) -> Result<Self> {
        Self::new(words.iter().map(|w| (*w, 0)))
    }

    /// One word per line, optionally followed by a tab and a frequency.
    pub fn parse(path: &Path, content: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            let word = parts.next().unwrap_or_default().trim();
            let freq = match parts.next() {
                Some(f) if !f.trim().is_empty() => f
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad frequency {f:?}")))?,
                _ => 0,
            };
            entries.push((word.to_string(), freq));
        }
        Self::new(entries).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(path, &read_to_string(path)?)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(word)
    }

    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.words.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    /// Lexicon words at optimal-string-alignment distance exactly 1.
    pub fn neighbors(&self, word: &str) -> Vec<&str> {
        let chars: Vec<char> = word.chars().collect();
        let mut variants: HashSet<String> = HashSet::new();
        let n = chars.len();
        for i in 0..n {
            let mut v = chars.clone();
            v.remove(i);
            variants.insert(v.into_iter().collect());
        }
        for i in 0..n.saturating_sub(1) {
            let mut v = chars.clone();
            v.swap(i, i + 1);
            variants.insert(v.into_iter().collect());
        }
        for &c in &self.alphabet {
            for i in 0..n {
                let mut v = chars.clone();
                v[i] = c;
                variants.insert(v.into_iter().collect());
            }
            for i in 0..=n {
                let mut v = chars.clone();
                v.insert(i, c);
                variants.insert(v.into_iter().collect());
            }
        }
        variants.remove(word);
        let mut out: Vec<&str> = variants
            .iter()
            .filter_map(|v| self.words.get_key_value(v.as_str()).map(|(k, _)| k.as_str()))
            .collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    /// Minimum gain in total sentence log-probability (natural log) for an
    /// edit to be accepted.
    pub min_improvement: f64,
    pub max_iterations: usize,
    pub max_candidates_per_token: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            min_improvement: 1.0,
            max_iterations: 10,
            max_candidates_per_token: 20,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_improvement > 0.0) {
            return Err(Error::Config(format!(
                "improvement threshold must be positive, got {}",
                self.min_improvement
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    Substitution,
    Split,
    Deletion,
}

/// A sentence differing from the input by one local edit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub edit: Edit,
    pub tokens: TokenSequence,
}

fn match_case(template: &str, word: &str) -> String {
    let upper_initial = template.chars().next().is_some_and(char::is_uppercase);
    if !upper_initial {
        return word.to_string();
    }
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Local edit candidates for every token.
///
/// Per token: lexicon words at distance 1 and two-word splits whose halves
/// are both lexicon words, ranked by frequency and capped at
/// `max_candidates_per_token`; plus deleting the token. Candidates that
/// produce an identical sentence are kept once.
pub fn generate_candidates(sentence: &TokenSequence, lexicon: &Lexicon, cfg: &BaselineConfig) -> Vec<Candidate> {
    let tokens = sentence.tokens();
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |kind: CandidateKind, i: usize, replacement: Vec<String>, out: &mut Vec<Candidate>| {
        let mut new_tokens = tokens.to_vec();
        new_tokens.splice(i..i + 1, replacement.iter().cloned());
        if new_tokens.as_slice() == tokens || !seen.insert(new_tokens.clone()) {
            return;
        }
        out.push(Candidate {
            kind,
            edit: Edit {
                start: i,
                end: i + 1,
                replacement,
            },
            tokens: TokenSequence::from_vec_unchecked(new_tokens),
        });
    };
    for (i, token) in tokens.iter().enumerate() {
        let lower = token.to_lowercase();
        let mut ranked: Vec<(u64, String, CandidateKind, Vec<String>)> = Vec::new();
        for word in lexicon.neighbors(&lower) {
            let freq = lexicon.frequency(word).unwrap_or(0);
            let w = match_case(token, word);
            ranked.push((freq, w.clone(), CandidateKind::Substitution, vec![w]));
        }
        let chars: Vec<char> = lower.chars().collect();
        for cut in 1..chars.len() {
            let left: String = chars[..cut].iter().collect();
            let right: String = chars[cut..].iter().collect();
            if let (Some(fl), Some(fr)) = (lexicon.frequency(&left), lexicon.frequency(&right)) {
                let l = match_case(token, &left);
                ranked.push((fl.min(fr), format!("{l} {right}"), CandidateKind::Split, vec![l, right]));
            }
        }
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        ranked.truncate(cfg.max_candidates_per_token);
        for (_, _, kind, replacement) in ranked {
            push(kind, i, replacement, &mut out);
        }
        push(CandidateKind::Deletion, i, Vec::new(), &mut out);
    }
    out
}

/// One accepted edit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub before: String,
    pub after: String,
    pub kind: CandidateKind,
    pub edit: Edit,
    pub log_prob: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTrace {
    pub steps: Vec<TraceStep>,
}

impl CorrectionTrace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }
}

/// Greedy correction loop. Each round scores every candidate and accepts
/// the best (highest log-probability, then lexically smallest text) if it
/// beats the current sentence by at least `min_improvement`. Returns the
/// input unchanged when nothing is accepted; otherwise the single-space
/// joined tokens.
pub fn correct_sentence(
    sentence: &str,
    model: &NgramModel,
    lexicon: &Lexicon,
    cfg: &BaselineConfig,
) -> (String, CorrectionTrace) {
    let mut tokens = tokenize(&normalize(sentence));
    let mut current_text = detokenize(&tokens);
    let mut current = model.score_text(&current_text).log_prob;
    let mut trace = CorrectionTrace::default();
    for _ in 0..cfg.max_iterations {
        let candidates = generate_candidates(&tokens, lexicon, cfg);
        let scored: Vec<(f64, String, usize)> = candidates
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let text = detokenize(&c.tokens);
                (model.score_text(&text).log_prob, text, i)
            })
            .collect();
        let best = scored
            .into_iter()
            .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        let Some((score, text, idx)) = best else { break };
        let delta = score - current;
        if !(delta >= cfg.min_improvement) {
            break;
        }
        let cand = &candidates[idx];
        trace.steps.push(TraceStep {
            before: current_text.clone(),
            after: text.clone(),
            kind: cand.kind,
            edit: cand.edit.clone(),
            log_prob: score,
            delta,
        });
        tokens = cand.tokens.clone();
        current_text = text;
        current = score;
    }
    if trace.is_empty() {
        (sentence.to_string(), trace)
    } else {
        (current_text, trace)
    }
}

/// Distance used for substitution candidates; exposed for tests and tools.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    osa_distance(&a, &b)
}

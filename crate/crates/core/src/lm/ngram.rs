use super::{LanguageModel, LmScore, ScorerError};
use crate::error::{Error, Result};
use crate::text::normalize;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

pub const DEFAULT_ORDER: usize = 5;
pub const DEFAULT_K: f64 = 0.1;
pub const MODEL_FORMAT_VERSION: u32 = 1;
const FORMAT_NAME: &str = "gec-eval-char-ngram";

const BOS: u32 = 0;
const EOS: u32 = 1;
const UNK: u32 = 2;
const FIRST_CHAR: u32 = 3;

/// A model symbol: a character, or one of the padding/unknown sentinels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Begin,
    End,
    Unknown,
    Char(char),
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    total: u64,
    next: HashMap<u32, u64>,
}

/// Character n-gram model with add-k smoothing.
///
/// Texts are normalized, padded with `order - 1` begin sentinels and one end
/// sentinel. Characters not seen in training map to a shared unknown
/// symbol, so the predictive vocabulary is the training characters plus the
/// end and unknown sentinels.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    order: usize,
    k: f64,
    vocabulary: Vec<char>,
    index: HashMap<char, u32>,
    counts: HashMap<Vec<u32>, ContextCounts>,
}

impl NgramModel {
    pub fn train<S: AsRef<str>>(corpus: &[S], order: usize, k: f64) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Input("cannot train a language model on an empty corpus".into()));
        }
        if order == 0 {
            return Err(Error::Config("n-gram order must be at least 1".into()));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Config(format!("smoothing constant k must be positive, got {k}")));
        }
        let texts: Vec<String> = corpus.iter().map(|t| normalize(t.as_ref())).collect();
        let mut vocabulary: Vec<char> = texts.iter().flat_map(|t| t.chars()).collect();
        vocabulary.sort_unstable();
        vocabulary.dedup();
        let mut model = NgramModel {
            order,
            k,
            index: build_index(&vocabulary),
            vocabulary,
            counts: HashMap::new(),
        };
        for text in &texts {
            let symbols = model.pad(text);
            for window in symbols.windows(order) {
                let (ctx, next) = window.split_at(order - 1);
                let entry = model.counts.entry(ctx.to_vec()).or_default();
                entry.total += 1;
                *entry.next.entry(next[0]).or_insert(0) += 1;
            }
        }
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Training characters, sorted.
    pub fn vocabulary(&self) -> &[char] {
        &self.vocabulary
    }

    /// Size of the predictive vocabulary (characters plus end and unknown).
    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len() + 2
    }

    /// Every symbol the model can predict.
    pub fn predictable_symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        [Symbol::End, Symbol::Unknown]
            .into_iter()
            .chain(self.vocabulary.iter().map(|&c| Symbol::Char(c)))
    }

    fn id(&self, symbol: Symbol) -> u32 {
        match symbol {
            Symbol::Begin => BOS,
            Symbol::End => EOS,
            Symbol::Unknown => UNK,
            Symbol::Char(c) => self.char_id(c),
        }
    }

    fn char_id(&self, c: char) -> u32 {
        self.index.get(&c).copied().unwrap_or(UNK)
    }

    fn pad(&self, text: &str) -> Vec<u32> {
        let mut symbols = vec![BOS; self.order - 1];
        symbols.extend(text.chars().map(|c| self.char_id(c)));
        symbols.push(EOS);
        symbols
    }

    fn prob_ids(&self, context: &[u32], next: u32) -> f64 {
        let v = self.vocab_size() as f64;
        match self.counts.get(context) {
            Some(c) => {
                let hits = c.next.get(&next).copied().unwrap_or(0) as f64;
                (hits + self.k) / (c.total as f64 + self.k * v)
            }
            None => 1.0 / v,
        }
    }

    /// Smoothed probability of `next` after `context`. The context must hold
    /// exactly `order - 1` symbols.
    pub fn conditional_prob(&self, context: &[Symbol], next: Symbol) -> f64 {
        assert_eq!(context.len(), self.order - 1, "context length must be order - 1");
        let ctx: Vec<u32> = context.iter().map(|&s| self.id(s)).collect();
        if next == Symbol::Begin {
            return 0.0;
        }
        self.prob_ids(&ctx, self.id(next))
    }

    /// Log-probability contributed by each predicted symbol, the end
    /// sentinel last.
    pub fn log_prob_steps(&self, text: &str) -> Vec<f64> {
        let symbols = self.pad(&normalize(text));
        symbols
            .windows(self.order)
            .map(|w| {
                let (ctx, next) = w.split_at(self.order - 1);
                self.prob_ids(ctx, next[0]).ln()
            })
            .collect()
    }

    pub fn score_text(&self, text: &str) -> LmScore {
        let steps = self.log_prob_steps(text);
        LmScore {
            log_prob: steps.iter().sum(),
            token_count: steps.len() as u64,
        }
    }

    pub fn to_json(&self) -> String {
        let mut contexts: Vec<ContextEntry> = self
            .counts
            .iter()
            .map(|(ctx, c)| ContextEntry {
                context: ctx.clone(),
                next: c.next.iter().map(|(&s, &n)| (s, n)).collect::<BTreeMap<_, _>>().into_iter().collect(),
            })
            .collect();
        contexts.sort_by(|a, b| a.context.cmp(&b.context));
        let file = ModelFile {
            format: FORMAT_NAME.to_string(),
            version: MODEL_FORMAT_VERSION,
            order: self.order,
            k: self.k,
            vocabulary: self.vocabulary.iter().map(|c| c.to_string()).collect(),
            contexts,
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(json).map_err(|e| Error::Input(format!("model file: {e}")))?;
        if file.format != FORMAT_NAME {
            return Err(Error::Input(format!("not an n-gram model file (format {:?})", file.format)));
        }
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::Input(format!("unsupported model version {}", file.version)));
        }
        if file.order == 0 || !(file.k.is_finite() && file.k > 0.0) {
            return Err(Error::Input("model file has invalid order or k".into()));
        }
        let mut vocabulary = Vec::with_capacity(file.vocabulary.len());
        for s in &file.vocabulary {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => vocabulary.push(c),
                _ => return Err(Error::Input(format!("vocabulary entry {s:?} is not one character"))),
            }
        }
        if vocabulary.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("model vocabulary must be sorted and unique".into()));
        }
        let max_id = FIRST_CHAR + vocabulary.len() as u32;
        let mut counts = HashMap::new();
        for entry in file.contexts {
            if entry.context.len() != file.order - 1
                || entry.context.iter().any(|&s| s >= max_id || s == EOS)
            {
                return Err(Error::Input(format!("invalid context {:?}", entry.context)));
            }
            let mut c = ContextCounts::default();
            for (sym, n) in entry.next {
                if sym >= max_id || sym == BOS {
                    return Err(Error::Input(format!("invalid symbol id {sym}")));
                }
                c.total += n;
                c.next.insert(sym, n);
            }
            counts.insert(entry.context, c);
        }
        Ok(NgramModel {
            order: file.order,
            k: file.k,
            index: build_index(&vocabulary),
            vocabulary,
            counts,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }
}

fn build_index(vocabulary: &[char]) -> HashMap<char, u32> {
    vocabulary
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, FIRST_CHAR + i as u32))
        .collect()
}

impl LanguageModel for NgramModel {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError> {
        Ok(self.score_text(text))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    order: usize,
    k: f64,
    vocabulary: Vec<String>,
    contexts: Vec<ContextEntry>,
}

#[derive(Serialize, Deserialize)]
struct ContextEntry {
    context: Vec<u32>,
    next: Vec<(u32, u64)>,
}

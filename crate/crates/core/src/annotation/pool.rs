use super::AnnotationItem;
use crate::corpus::{read_corpus, read_to_string, SentenceRecord};
use crate::error::{Error, Result};
use serde::Deserialize;
use std::collections::{HashMap, HashSet};
use std::path::Path;

/// One line of a system-outputs file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemOutput {
    pub sentence_id: String,
    pub system: String,
    pub output: String,
    #[serde(default)]
    pub batch: Option<String>,
    /// Defaults to `<sentence_id>/<system>`.
    #[serde(default)]
    pub item_id: Option<String>,
}

/// Joins system outputs with their corpus sentences. Every output must name
/// a known sentence that has a minimal reference.
pub fn build_pool(corpus: &[SentenceRecord], outputs_path: &Path, outputs: &str) -> Result<Vec<AnnotationItem>> {
    let sentences: HashMap<&str, &SentenceRecord> = corpus.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut ids = HashSet::new();
    let mut pool = Vec::new();
    for (i, line) in outputs.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| Error::parse(outputs_path, i + 1, m);
        let out: SystemOutput = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let sentence = sentences
            .get(out.sentence_id.as_str())
            .ok_or_else(|| err(format!("unknown sentence id {:?}", out.sentence_id)))?;
        let reference = sentence
            .minimal_reference()
            .ok_or_else(|| err(format!("sentence {:?} has no reference", out.sentence_id)))?;
        if out.system.trim().is_empty() || out.output.trim().is_empty() {
            return Err(err("empty system name or output".into()));
        }
        let item_id = out.item_id.unwrap_or_else(|| format!("{}/{}", out.sentence_id, out.system));
        if !ids.insert(item_id.clone()) {
            return Err(err(format!("duplicate item id {item_id:?}")));
        }
        pool.push(AnnotationItem {
            item_id,
            sentence_id: out.sentence_id,
            system: out.system,
            cefr: sentence.cefr,
            output: out.output,
            reference: reference.to_string(),
            source: sentence.source.clone(),
            batch: out.batch,
        });
    }
    Ok(pool)
}

pub fn load_pool(corpus_path: &Path, outputs_path: &Path) -> Result<Vec<AnnotationItem>> {
    let corpus = read_corpus(corpus_path)?;
    build_pool(&corpus, outputs_path, &read_to_string(outputs_path)?)
}

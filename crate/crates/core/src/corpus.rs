//! Sentence corpora: JSON-lines records and plain line-aligned text files.

use crate::error::{Error, Result};
use crate::text::normalize;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

/// Proficiency level of the learner who wrote a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Cefr {
    A,
    B,
    C,
    #[default]
    Unknown,
}

impl Cefr {
    pub const LEVELS: [Cefr; 3] = [Cefr::A, Cefr::B, Cefr::C];

    pub fn as_str(self) -> &'static str {
        match self {
            Cefr::A => "A",
            Cefr::B => "B",
            Cefr::C => "C",
            Cefr::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Cefr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Cefr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" | "A1" | "A2" => Ok(Cefr::A),
            "B" | "b" | "B1" | "B2" => Ok(Cefr::B),
            "C" | "c" | "C1" | "C2" => Ok(Cefr::C),
            "" | "unknown" | "null" | "-" => Ok(Cefr::Unknown),
            other => Err(Error::Input(format!("unknown CEFR level {other:?}"))),
        }
    }
}

impl Serialize for Cefr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cefr::Unknown => s.serialize_none(),
            level => s.serialize_str(level.as_str()),
        }
    }
}

impl<'de> Deserialize<'de> for Cefr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(Cefr::Unknown),
            Some(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One learner sentence with its level and reference corrections. The
/// first reference, when present, is the minimal correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub source: String,
    #[serde(default)]
    pub cefr: Cefr,
    #[serde(default)]
    pub references: Vec<String>,
}

impl SentenceRecord {
    pub fn minimal_reference(&self) -> Option<&str> {
        self.references.first().map(String::as_str)
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a JSON-lines corpus. Blank lines and lines starting with `#` are
/// skipped. Ids must be non-empty and unique; sources must be non-empty
/// after normalization.
pub fn read_corpus(path: &Path) -> Result<Vec<SentenceRecord>> {
    parse_corpus(path, &read_to_string(path)?)
}

pub fn parse_corpus(path: &Path, content: &str) -> Result<Vec<SentenceRecord>> {
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record: SentenceRecord = serde_json::from_str(trimmed)
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        if record.id.is_empty() {
            return Err(Error::parse(path, line_no, "empty sentence id"));
        }
        if !seen.insert(record.id.clone()) {
            return Err(Error::parse(path, line_no, format!("duplicate sentence id {:?}", record.id)));
        }
        if normalize(&record.source).is_empty() {
            return Err(Error::parse(path, line_no, format!("sentence {:?} has an empty source", record.id)));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_corpus(path: &Path, records: &[SentenceRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("corpus records serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a plain text file with one sentence per line. Every line counts,
/// including blank ones, so line numbers stay aligned across files.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let content = read_to_string(path)?;
    Ok(content.lines().map(str::to_string).collect())
}

/// Reads several line-aligned files and checks that they have equal length.
pub fn read_parallel(paths: &[&Path]) -> Result<Vec<Vec<String>>> {
    let columns = paths
        .iter()
        .map(|p| read_lines(p))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = columns.first() {
        for (path, col) in paths.iter().zip(&columns).skip(1) {
            if col.len() != first.len() {
                return Err(Error::Input(format!(
                    "{} has {} lines but {} has {}",
                    path.display(),
                    col.len(),
                    paths[0].display(),
                    first.len()
                )));
            }
        }
    }
    Ok(columns)
}

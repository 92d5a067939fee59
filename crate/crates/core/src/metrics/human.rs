//! Reports over human post-edits and Likert judgements.

use super::report::{align, MetricReport};
use crate::corpus::Cefr;
use crate::error::{Error, Result};
use crate::text::nld;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A 4-level Likert judgement, or "other" when none of the levels applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LikertScore {
    Level(u8),
    Other,
}

impl LikertScore {
    pub fn new(level: u8) -> Result<Self> {
        if (1..=4).contains(&level) {
            Ok(LikertScore::Level(level))
        } else {
            Err(Error::Input(format!("Likert score must be 1-4 or \"other\", got {level}")))
        }
    }

    pub fn numeric(self) -> Option<u8> {
        match self {
            LikertScore::Level(v) => Some(v),
            LikertScore::Other => None,
        }
    }

    /// Parses a JSON value: an integer 1-4 or the string "other".
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::Number(n) => match n.as_u64() {
                Some(v) if (1..=4).contains(&v) => Ok(LikertScore::Level(v as u8)),
                _ => Err(Error::Input(format!("Likert score must be 1-4 or \"other\", got {n}"))),
            },
            serde_json::Value::String(s) => s.parse(),
            other => Err(Error::Input(format!("Likert score must be 1-4 or \"other\", got {other}"))),
        }
    }
}

impl fmt::Display for LikertScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LikertScore::Level(v) => write!(f, "{v}"),
            LikertScore::Other => f.write_str("other"),
        }
    }
}

impl FromStr for LikertScore {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("other") {
            return Ok(LikertScore::Other);
        }
        match s.parse::<u8>() {
            Ok(v) => LikertScore::new(v),
            Err(_) => Err(Error::Input(format!("Likert score must be 1-4 or \"other\", got {s:?}"))),
        }
    }
}

impl Serialize for LikertScore {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LikertScore::Level(v) => s.serialize_u8(*v),
            LikertScore::Other => s.serialize_str("other"),
        }
    }
}

impl<'de> Deserialize<'de> for LikertScore {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        LikertScore::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// The three judged dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Grammaticality,
    Fluency,
    Meaning,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::Grammaticality, Dimension::Fluency, Dimension::Meaning];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Grammaticality => "grammaticality",
            Dimension::Fluency => "fluency",
            Dimension::Meaning => "meaning",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Dimension::Grammaticality => "Grammaticality",
            Dimension::Fluency => "Fluency",
            Dimension::Meaning => "Meaning preservation",
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grammaticality" | "gramm" | "g" => Ok(Dimension::Grammaticality),
            "fluency" | "f" => Ok(Dimension::Fluency),
            "meaning" | "meaning_preservation" | "m" => Ok(Dimension::Meaning),
            other => Err(Error::Input(format!("unknown dimension {other:?}"))),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scores for all three dimensions of one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreTriple {
    pub grammaticality: LikertScore,
    pub fluency: LikertScore,
    pub meaning: LikertScore,
}

impl ScoreTriple {
    pub fn get(&self, d: Dimension) -> LikertScore {
        match d {
            Dimension::Grammaticality => self.grammaticality,
            Dimension::Fluency => self.fluency,
            Dimension::Meaning => self.meaning,
        }
    }
}

/// One system output with its human post-edit.
#[derive(Debug, Clone, PartialEq)]
pub struct PostEditItem {
    pub system: String,
    pub cefr: Cefr,
    pub output: String,
    pub postedit: String,
}

/// Mean normalized Levenshtein distance between each output and its
/// post-edit, per system and level.
pub fn postedit_report(items: &[PostEditItem]) -> Result<MetricReport> {
    if items.is_empty() {
        return Err(Error::Input("post-edit report needs at least one item".into()));
    }
    Ok(MetricReport::from_means(
        "Normalized Levenshtein distance (NLD)",
        items
            .iter()
            .map(|it| (it.system.as_str(), it.cefr, Some(nld(&it.output, &it.postedit)))),
    ))
}

/// Mean Likert score per system and level; "other" is excluded.
pub fn likert_report<'a, I>(dimension: Dimension, items: I) -> MetricReport
where
    I: IntoIterator<Item = (&'a str, Cefr, &'a ScoreTriple)>,
{
    MetricReport::from_means(
        dimension.title(),
        items
            .into_iter()
            .map(|(system, cefr, s)| (system, cefr, s.get(dimension).numeric().map(f64::from))),
    )
}

/// Counts of each score for one system, columns ordered from identical (4)
/// to substantial (1), then other.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    pub system: String,
    /// Index 0 holds score 4, index 3 holds score 1.
    pub levels: [u64; 4],
    pub other: u64,
}

impl ScoreHistogram {
    pub fn count(&self, score: LikertScore) -> u64 {
        match score {
            LikertScore::Level(v) => self.levels[4 - v as usize],
            LikertScore::Other => self.other,
        }
    }

    pub fn total(&self) -> u64 {
        self.levels.iter().sum::<u64>() + self.other
    }

    /// Mean over numeric scores; `None` when every score is "other".
    pub fn mean(&self) -> Option<f64> {
        let n: u64 = self.levels.iter().sum();
        if n == 0 {
            return None;
        }
        let weighted: u64 = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, c)| (4 - i as u64) * c)
            .sum();
        Some(weighted as f64 / n as f64)
    }
}

pub const DISTRIBUTION_COLUMNS: [&str; 5] = ["Identical", "Minor", "Moderate", "Substantial", "Other"];

/// Per-system histograms, systems in first-appearance order.
pub fn score_distribution<'a, I>(ratings: I) -> Vec<ScoreHistogram>
where
    I: IntoIterator<Item = (&'a str, LikertScore)>,
{
    let mut out: Vec<ScoreHistogram> = Vec::new();
    for (system, score) in ratings {
        let idx = match out.iter().position(|h| h.system == system) {
            Some(i) => i,
            None => {
                out.push(ScoreHistogram {
                    system: system.to_string(),
                    ..Default::default()
                });
                out.len() - 1
            }
        };
        match score {
            LikertScore::Level(v) => out[idx].levels[4 - v as usize] += 1,
            LikertScore::Other => out[idx].other += 1,
        }
    }
    out
}

pub fn render_distribution(title: &str, hist: &[ScoreHistogram]) -> String {
    let mut rows = vec![std::iter::once("System")
        .chain(DISTRIBUTION_COLUMNS)
        .chain(std::iter::once("Mean"))
        .map(str::to_string)
        .collect::<Vec<_>>()];
    for h in hist {
        let mut row = vec![h.system.clone()];
        row.extend(h.levels.iter().map(|c| c.to_string()));
        row.push(h.other.to_string());
        row.push(h.mean().map_or("-".to_string(), |m| format!("{m:.2}")));
        rows.push(row);
    }
    format!("{title}\n{}", align(&rows))
}

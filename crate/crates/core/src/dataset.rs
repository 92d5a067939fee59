//! Reading post-edited and scored system outputs, either from this crate's
//! own annotation export or from delimited tables with a header row.
//!
//! Tables are tab-separated. Column names are matched case-insensitively,
//! ignoring spaces, dashes and underscores:
//!
//! | field       | accepted names                                    |
//! |-------------|---------------------------------------------------|
//! | system      | `system`, `model`, `corrector`                    |
//! | output      | `output`, `systemoutput`, `hypothesis`, `corrected` |
//! | postedit    | `postedit`, `postedited`, `edited`                |
//! | cefr        | `cefr`, `level`, `cefrlevel` (optional)           |
//! | sentence id | `sentenceid`, `sentence`, `id` (optional)         |
//! | scores      | `grammaticality`, `fluency`, `meaning`, `meaningpreservation` (optional) |
//!
//! A directory is read file by file in name order, taking `*.jsonl`,
//! `*.tsv` and `*.txt` files.

use crate::annotation::RatingRecord;
use crate::corpus::{read_to_string, Cefr};
use crate::error::{Error, Result};
use crate::metrics::{
    likert_report, postedit_report, score_distribution, Dimension, LikertScore, MetricReport, PostEditItem,
    ScoreHistogram, ScoreTriple,
};
use std::path::{Path, PathBuf};

/// One system output with its human post-edit and, when available, scores.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedOutput {
    pub sentence_id: String,
    pub system: String,
    pub cefr: Cefr,
    pub output: String,
    pub postedit: String,
    pub scores: Option<ScoreTriple>,
}

impl From<RatingRecord> for AnnotatedOutput {
    fn from(r: RatingRecord) -> Self {
        AnnotatedOutput {
            sentence_id: r.sentence_id,
            system: r.system,
            cefr: r.cefr,
            output: r.output,
            postedit: r.postedit,
            scores: Some(r.scores),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    System,
    Output,
    Postedit,
    Cefr,
    SentenceId,
    Score(Dimension),
}

fn column(name: &str) -> Option<Column> {
    let key: String = name
        .chars()
        .filter(|c| !matches!(c, ' ' | '-' | '_'))
        .flat_map(char::to_lowercase)
        .collect();
    Some(match key.as_str() {
        "system" | "model" | "corrector" => Column::System,
        "output" | "systemoutput" | "hypothesis" | "corrected" => Column::Output,
        "postedit" | "postedited" | "edited" => Column::Postedit,
        "cefr" | "level" | "cefrlevel" => Column::Cefr,
        "sentenceid" | "sentence" | "id" => Column::SentenceId,
        "grammaticality" => Column::Score(Dimension::Grammaticality),
        "fluency" => Column::Score(Dimension::Fluency),
        "meaning" | "meaningpreservation" => Column::Score(Dimension::Meaning),
        _ => return None,
    })
}

fn parse_table(path: &Path, content: &str) -> Result<Vec<AnnotatedOutput>> {
    let mut lines = content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((header_line, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let columns: Vec<Option<Column>> = header.trim_end_matches('\r').split('\t').map(column).collect();
    let find = |c: Column| columns.iter().position(|x| *x == Some(c));
    let required = |c: Column, name: &str| {
        find(c).ok_or_else(|| Error::parse(path, header_line + 1, format!("header has no {name} column")))
    };
    let sys = required(Column::System, "system")?;
    let out = required(Column::Output, "output")?;
    let pe = required(Column::Postedit, "post-edit")?;
    let cefr = find(Column::Cefr);
    let sid = find(Column::SentenceId);
    let dims: Vec<Option<usize>> = Dimension::ALL.iter().map(|&d| find(Column::Score(d))).collect();
    let has_scores = dims.iter().all(Option::is_some);
    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        if fields.len() != columns.len() {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        let level = match cefr {
            Some(c) => fields[c].parse().map_err(|e: Error| Error::parse(path, line_no, e.to_string()))?,
            None => Cefr::Unknown,
        };
        let scores = if has_scores {
            let get = |k: usize| -> Result<LikertScore> {
                let raw = fields[dims[k].expect("checked")];
                raw.parse().map_err(|e: Error| Error::parse(path, line_no, e.to_string()))
            };
            Some(ScoreTriple {
                grammaticality: get(0)?,
                fluency: get(1)?,
                meaning: get(2)?,
            })
        } else {
            None
        };
        records.push(AnnotatedOutput {
            sentence_id: sid.map_or_else(|| line_no.to_string(), |c| fields[c].to_string()),
            system: fields[sys].trim().to_string(),
            cefr: level,
            output: fields[out].to_string(),
            postedit: fields[pe].to_string(),
            scores,
        });
    }
    Ok(records)
}

/// Parses one file, choosing JSON lines or a table from the first
/// non-comment line.
pub fn parse_annotations(path: &Path, content: &str) -> Result<Vec<AnnotatedOutput>> {
    let first = content.lines().find(|l| !l.trim().is_empty() && !l.starts_with('#'));
    match first {
        None => Ok(Vec::new()),
        Some(l) if l.trim_start().starts_with('{') => Ok(crate::annotation::parse_export(path, content)?
            .into_iter()
            .map(AnnotatedOutput::from)
            .collect()),
        Some(_) => parse_table(path, content),
    }
}

fn data_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("jsonl" | "tsv" | "txt")
                )
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Reads a file, or every data file of a directory.
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotatedOutput>> {
    if path.is_dir() {
        let mut out = Vec::new();
        for file in data_files(path)? {
            out.extend(parse_annotations(&file, &read_to_string(&file)?)?);
        }
        if out.is_empty() {
            return Err(Error::Input(format!("{}: no annotation files found", path.display())));
        }
        Ok(out)
    } else {
        parse_annotations(path, &read_to_string(path)?)
    }
}

/// Mean output-to-post-edit NLD per system and level.
pub fn nld_report(records: &[AnnotatedOutput]) -> Result<MetricReport> {
    let items: Vec<PostEditItem> = records
        .iter()
        .map(|r| PostEditItem {
            system: r.system.clone(),
            cefr: r.cefr,
            output: r.output.clone(),
            postedit: r.postedit.clone(),
        })
        .collect();
    postedit_report(&items)
}

fn scored(records: &[AnnotatedOutput]) -> Result<Vec<(&AnnotatedOutput, &ScoreTriple)>> {
    records
        .iter()
        .map(|r| {
            r.scores.as_ref().map(|s| (r, s)).ok_or_else(|| {
                Error::Input(format!("sentence {} ({}) has no scores", r.sentence_id, r.system))
            })
        })
        .collect()
}

pub fn likert_table(records: &[AnnotatedOutput], dimension: Dimension) -> Result<MetricReport> {
    let rows = scored(records)?;
    Ok(likert_report(
        dimension,
        rows.iter().map(|(r, s)| (r.system.as_str(), r.cefr, *s)),
    ))
}

pub fn distribution(records: &[AnnotatedOutput], dimension: Dimension) -> Result<Vec<ScoreHistogram>> {
    let rows = scored(records)?;
    Ok(score_distribution(rows.iter().map(|(r, s)| (r.system.as_str(), s.get(dimension)))))
}

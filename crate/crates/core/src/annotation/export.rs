use super::{AnnotationError, RatingRecord};
use crate::corpus::read_to_string;
use crate::error::{Error, Result};
use crate::metrics::report::align;
use crate::metrics::{qwk, Dimension, RatingMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const EXPORT_HEADER: &str = "# gec-eval annotations v1";

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
pub struct ExportFilter {
    #[serde(default)]
    pub annotator: Option<String>,
    #[serde(default)]
    pub system: Option<String>,
}

impl ExportFilter {
    pub fn matches(&self, r: &RatingRecord) -> bool {
        self.annotator.as_ref().is_none_or(|a| *a == r.annotator)
            && self.system.as_ref().is_none_or(|s| *s == r.system)
    }
}

/// Header line, then one JSON object per record ordered by
/// (annotator, item_id).
pub fn render_export(records: &[RatingRecord]) -> String {
    let mut sorted: Vec<&RatingRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.annotator, &a.item_id).cmp(&(&b.annotator, &b.item_id)));
    let mut out = String::from(EXPORT_HEADER);
    out.push('\n');
    for r in sorted {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_export(path: &Path, content: &str) -> Result<Vec<RatingRecord>> {
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let rec: RatingRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_export(path: &Path) -> Result<Vec<RatingRecord>> {
    parse_export(path, &read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementCell {
    pub dimension: Dimension,
    /// `None` when kappa is undefined for the pairs in this cell.
    pub kappa: Option<f64>,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementRow {
    pub batch: String,
    pub cells: Vec<AgreementCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub a: String,
    pub b: String,
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    /// Batches as rows, dimensions as columns.
    pub fn render_text(&self, decimals: usize) -> String {
        let mut rows = Vec::new();
        if let Some(first) = self.rows.first() {
            let mut header = vec!["Batch".to_string()];
            header.extend(first.cells.iter().map(|c| c.dimension.title().to_string()));
            rows.push(header);
        }
        for r in &self.rows {
            let mut row = vec![r.batch.clone()];
            row.extend(
                r.cells
                    .iter()
                    .map(|c| c.kappa.map_or("-".to_string(), |k| format!("{k:.decimals$}"))),
            );
            rows.push(row);
        }
        format!("Quadratically weighted kappa ({} vs {})\n{}", self.a, self.b, align(&rows))
    }
}

fn cell(pairs: &[(&RatingRecord, &RatingRecord)], dimension: Dimension) -> AgreementCell {
    let numeric: Vec<(u32, u32)> = pairs
        .iter()
        .filter_map(|(x, y)| {
            let a = x.scores.get(dimension).numeric()?;
            let b = y.scores.get(dimension).numeric()?;
            Some((u32::from(a), u32::from(b)))
        })
        .collect();
    let n = numeric.len();
    let kappa = RatingMatrix::new(4, numeric).ok().and_then(|m| qwk(&m).ok());
    AgreementCell {
        dimension,
        kappa,
        pairs: n,
    }
}

/// Pairs the two annotators' finished items by item id and computes QWK per
/// batch and dimension, leaving out pairs where either score is "other".
/// With more than one batch a pooled "All" row is appended.
pub fn agreement_report<F>(
    ratings: &[RatingRecord],
    batch_of: F,
    a: &str,
    b: &str,
    dimensions: &[Dimension],
) -> std::result::Result<AgreementReport, AnnotationError>
where
    F: Fn(&str) -> Option<String>,
{
    let by = |who: &str| -> BTreeMap<&str, &RatingRecord> {
        ratings
            .iter()
            .filter(|r| r.annotator == who)
            .map(|r| (r.item_id.as_str(), r))
            .collect()
    };
    let (ra, rb) = (by(a), by(b));
    let mut batches: BTreeMap<String, Vec<(&RatingRecord, &RatingRecord)>> = BTreeMap::new();
    let mut all = Vec::new();
    for (id, x) in &ra {
        if let Some(y) = rb.get(id) {
            let batch = batch_of(id).unwrap_or_else(|| "All".to_string());
            batches.entry(batch).or_default().push((*x, *y));
            all.push((*x, *y));
        }
    }
    if all.is_empty() {
        return Err(AnnotationError::EmptyOverlap {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    let multiple = batches.len() > 1;
    let mut groups: Vec<(String, Vec<_>)> = batches.into_iter().collect();
    if multiple {
        groups.push(("All".to_string(), all));
    }
    let rows = groups
        .into_iter()
        .map(|(batch, pairs)| AgreementRow {
            batch,
            cells: dimensions.iter().map(|&d| cell(&pairs, d)).collect(),
        })
        .collect();
    Ok(AgreementReport {
        a: a.to_string(),
        b: b.to_string(),
        rows,
    })
}

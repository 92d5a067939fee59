use crate::corpus::Cefr;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Column of a per-system report: the pooled overall value or one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    All,
    Cefr(Cefr),
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::All => "All",
            Level::Cefr(c) => c.as_str(),
        }
    }
}

/// One machine-readable report cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub metric: String,
    pub system: String,
    pub level: String,
    pub value: Option<f64>,
}

/// Per-system values of one metric, overall and per CEFR level.
///
/// Systems keep insertion order. The `All` column is always computed from
/// the pooled items, never as an average of the level columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    systems: Vec<String>,
    cells: BTreeMap<(usize, Level), Option<f64>>,
    /// Set when some items had no known CEFR level.
    pub has_unknown_level: bool,
}

impl MetricReport {
    pub fn new(metric: impl Into<String>) -> Self {
        MetricReport {
            metric: metric.into(),
            systems: Vec::new(),
            cells: BTreeMap::new(),
            has_unknown_level: false,
        }
    }

    fn system_index(&mut self, system: &str) -> usize {
        match self.systems.iter().position(|s| s == system) {
            Some(i) => i,
            None => {
                self.systems.push(system.to_string());
                self.systems.len() - 1
            }
        }
    }

    pub fn set(&mut self, system: &str, level: Level, value: Option<f64>) {
        if level == Level::Cefr(Cefr::Unknown) {
            self.has_unknown_level = true;
        }
        let i = self.system_index(system);
        self.cells.insert((i, level), value);
    }

    pub fn get(&self, system: &str, level: Level) -> Option<f64> {
        let i = self.systems.iter().position(|s| s == system)?;
        self.cells.get(&(i, level)).copied().flatten()
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    /// Builds a report of arithmetic means from `(system, level, value)`
    /// observations; `None` values are excluded from the means.
    pub fn from_means<'a, I>(metric: impl Into<String>, items: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, Cefr, Option<f64>)>,
    {
        let mut report = MetricReport::new(metric);
        let mut sums: BTreeMap<(usize, Level), (f64, usize)> = BTreeMap::new();
        for (system, cefr, value) in items {
            let i = report.system_index(system);
            for level in [Level::All, Level::Cefr(cefr)] {
                let slot = sums.entry((i, level)).or_insert((0.0, 0));
                if let Some(v) = value {
                    slot.0 += v;
                    slot.1 += 1;
                }
            }
            if cefr == Cefr::Unknown {
                report.has_unknown_level = true;
            }
        }
        for (key, (sum, n)) in sums {
            let mean = (n > 0).then(|| sum / n as f64);
            report.cells.insert(key, mean);
        }
        report
    }

    /// Columns present in this report, `All` first.
    pub fn levels(&self) -> Vec<Level> {
        let mut levels = vec![Level::All];
        for c in [Cefr::A, Cefr::B, Cefr::C, Cefr::Unknown] {
            if self.cells.keys().any(|(_, l)| *l == Level::Cefr(c)) {
                levels.push(Level::Cefr(c));
            }
        }
        levels
    }

    pub fn entries(&self) -> Vec<ReportEntry> {
        let levels = self.levels();
        let mut out = Vec::new();
        for (i, system) in self.systems.iter().enumerate() {
            for &level in &levels {
                if let Some(value) = self.cells.get(&(i, level)) {
                    out.push(ReportEntry {
                        metric: self.metric.clone(),
                        system: system.clone(),
                        level: level.label().to_string(),
                        value: *value,
                    });
                }
            }
        }
        out
    }

    /// Aligned plain-text table: one row per system, `All` then each level.
    pub fn render_text(&self, decimals: usize) -> String {
        let levels = self.levels();
        let mut rows: Vec<Vec<String>> = vec![std::iter::once("System".to_string())
            .chain(levels.iter().map(|l| l.label().to_string()))
            .collect()];
        for (i, system) in self.systems.iter().enumerate() {
            let mut row = vec![system.clone()];
            for &level in &levels {
                row.push(match self.cells.get(&(i, level)) {
                    Some(Some(v)) => format!("{v:.decimals$}"),
                    _ => "-".to_string(),
                });
            }
            rows.push(row);
        }
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.metric);
        out.push_str(&align(&rows));
        if self.has_unknown_level {
            out.push_str("note: some items had no CEFR level and are grouped under \"unknown\"\n");
        }
        out
    }
}

/// Left-aligns the first column and right-aligns the rest.
pub(crate) fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_is_pooled_not_level_average() {
        let items = [
            ("sys", Cefr::A, Some(0.0)),
            ("sys", Cefr::A, Some(0.0)),
            ("sys", Cefr::A, Some(0.0)),
            ("sys", Cefr::B, Some(1.0)),
        ];
        let r = MetricReport::from_means("NLD", items);
        assert_eq!(r.get("sys", Level::All), Some(0.25));
        assert_eq!(r.get("sys", Level::Cefr(Cefr::A)), Some(0.0));
        assert_eq!(r.get("sys", Level::Cefr(Cefr::B)), Some(1.0));
    }

    #[test]
    fn absent_values_render_as_dash() {
        let r = MetricReport::from_means("Meaning", [("s", Cefr::C, None)]);
        assert_eq!(r.get("s", Level::All), None);
        let text = r.render_text(2);
        assert!(text.contains('-'), "{text}");
    }

    #[test]
    fn text_layout() {
        let mut r = MetricReport::new("GLEU");
        r.set("Granska", Level::All, Some(0.47));
        r.set("Granska", Level::Cefr(Cefr::A), Some(0.35));
        let text = r.render_text(2);
        assert_eq!(text, "GLEU\nSystem    All     A\nGranska  0.47  0.35\n");
    }

    #[test]
    fn unknown_level_is_flagged() {
        let r = MetricReport::from_means("NLD", [("s", Cefr::Unknown, Some(0.1))]);
        assert!(r.has_unknown_level);
        assert!(r.render_text(3).contains("unknown"));
    }
}

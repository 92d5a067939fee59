use super::TokenSequence;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;

/// Replace the half-open source span `start..end` with `replacement`.
/// An empty span is an insertion; an empty replacement is a deletion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
}

impl Edit {
    pub fn new(span: Range<usize>, replacement: &[&str]) -> Self {
        Edit {
            start: span.start,
            end: span.end,
            replacement: replacement.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{} -> [{}]", self.start, self.end, self.replacement.join(", "))
    }
}

/// Span edits against a source of known length, sorted by span start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditSet {
    source_len: usize,
    edits: Vec<Edit>,
}

impl EditSet {
    /// Validates bounds, ordering and non-overlap against a source of
    /// `source_len` tokens.
    pub fn new(source_len: usize, edits: Vec<Edit>) -> Result<Self> {
        for (index, edit) in edits.iter().enumerate() {
            let invalid = |reason: &str| Error::InvalidEdit {
                index,
                edit: edit.to_string(),
                reason: reason.to_string(),
            };
            if edit.start > edit.end {
                return Err(invalid("span start after end"));
            }
            if edit.end > source_len {
                return Err(invalid(&format!("span exceeds source length {source_len}")));
            }
            if index > 0 {
                let prev = &edits[index - 1];
                if prev.end > edit.start {
                    return Err(invalid(&format!("overlaps or precedes edit {}", index - 1)));
                }
                if prev.start == edit.start && prev.end == edit.end {
                    return Err(invalid(&format!("duplicates span of edit {}", index - 1)));
                }
            }
        }
        Ok(EditSet { source_len, edits })
    }

    pub fn identity(source_len: usize) -> Self {
        EditSet { source_len, edits: Vec::new() }
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Match,
    Substitute,
    Delete,
    Insert,
}

/// Minimal-cost token alignment with unit costs, merged into span edits.
///
/// Backtracking prefers, in order: a match, a substitution, a deletion, an
/// insertion. Walking back from the end with matches first pushes edits
/// toward the left; substitution beats delete+insert pairs.
pub fn extract_edits(source: &TokenSequence, target: &TokenSequence) -> EditSet {
    let a = source.tokens();
    let b = target.tokens();
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut d = vec![0usize; (n + 1) * width];
    for i in 0..=n {
        d[i * width] = i;
    }
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i * width + j] = (d[(i - 1) * width + j - 1] + cost)
                .min(d[(i - 1) * width + j] + 1)
                .min(d[i * width + j - 1] + 1);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * width + j];
        let op = if i > 0 && j > 0 && a[i - 1] == b[j - 1] && d[(i - 1) * width + j - 1] == here {
            Op::Match
        } else if i > 0 && j > 0 && d[(i - 1) * width + j - 1] + 1 == here {
            Op::Substitute
        } else if i > 0 && d[(i - 1) * width + j] + 1 == here {
            Op::Delete
        } else {
            Op::Insert
        };
        match op {
            Op::Match | Op::Substitute => {
                i -= 1;
                j -= 1;
            }
            Op::Delete => i -= 1,
            Op::Insert => j -= 1,
        }
        ops.push(op);
    }
    ops.reverse();

    let mut edits = Vec::new();
    let (mut si, mut ti) = (0usize, 0usize);
    let mut open: Option<Edit> = None;
    for op in ops {
        if op == Op::Match {
            if let Some(edit) = open.take() {
                edits.push(edit);
            }
            si += 1;
            ti += 1;
            continue;
        }
        let edit = open.get_or_insert_with(|| Edit {
            start: si,
            end: si,
            replacement: Vec::new(),
        });
        match op {
            Op::Substitute => {
                edit.end += 1;
                edit.replacement.push(b[ti].clone());
                si += 1;
                ti += 1;
            }
            Op::Delete => {
                edit.end += 1;
                si += 1;
            }
            Op::Insert => {
                edit.replacement.push(b[ti].clone());
                ti += 1;
            }
            Op::Match => unreachable!(),
        }
    }
    if let Some(edit) = open.take() {
        edits.push(edit);
    }
    EditSet { source_len: n, edits }
}

/// Applies edits right-to-left.
pub fn apply_edits(source: &TokenSequence, edits: &EditSet) -> Result<TokenSequence> {
    if edits.source_len != source.len() {
        return Err(Error::Input(format!(
            "edit set was built for {} source tokens, got {}",
            edits.source_len,
            source.len()
        )));
    }
    // Re-check in case the set was deserialized without going through `new`.
    EditSet::new(edits.source_len, edits.edits.clone())?;
    let mut tokens = source.tokens().to_vec();
    for edit in edits.edits.iter().rev() {
        tokens.splice(edit.span(), edit.replacement.iter().cloned());
    }
    TokenSequence::new(tokens)
        .ok_or_else(|| Error::Input("edit replacement contains an empty or whitespace token".into()))
}

//! Text handling shared by every metric: normalization, tokenization,
//! edit distances and token-level edit extraction.

mod distance;
mod edits;
mod tokenize;

pub use distance::{levenshtein, levenshtein_seq, nld, osa_distance};
pub use edits::{apply_edits, extract_edits, Edit, EditSet};
pub use tokenize::{detokenize, is_punctuation, tokenize, TokenSequence};

use unicode_normalization::UnicodeNormalization;

/// Canonical composition, trimmed, with internal whitespace runs collapsed
/// to a single ASCII space.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for word in composed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Canonical composition only; whitespace is left untouched.
pub(crate) fn compose(text: &str) -> Vec<char> {
    text.nfc().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_and_collapses() {
        assert_eq!(normalize("  abc "), "abc");
        assert_eq!(normalize("a  b"), "a b");
        assert_eq!(normalize("a\t\n b"), "a b");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("   "), "");
    }

    #[test]
    fn composes_combining_marks() {
        let decomposed = "e\u{0301}";
        let precomposed = "\u{00e9}";
        assert_ne!(decomposed, precomposed);
        let a: Vec<char> = normalize(decomposed).chars().collect();
        let b: Vec<char> = normalize(precomposed).chars().collect();
        assert_eq!(a, b);
        assert_eq!(a, vec!['\u{00e9}']);
    }
}

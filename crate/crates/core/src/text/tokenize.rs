use serde::{Deserialize, Serialize};
use std::fmt;

/// An ordered list of tokens. Tokens are never empty and never contain
/// whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    /// Builds a sequence from pre-split tokens, returning `None` when any
    /// token is empty or contains whitespace.
    pub fn new(tokens: Vec<String>) -> Option<Self> {
        if tokens
            .iter()
            .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace))
        {
            Some(TokenSequence(tokens))
        } else {
            None
        }
    }

    pub fn from_strs(tokens: &[&str]) -> Option<Self> {
        Self::new(tokens.iter().map(|t| t.to_string()).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_vec_unchecked(tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty()));
        TokenSequence(tokens)
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Punctuation characters that become standalone tokens: ASCII
/// punctuation, the Latin-1 punctuation block, General Punctuation and
/// CJK punctuation.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '\u{00a1}'..='\u{00bf}' if !c.is_alphanumeric())
        || ('\u{2010}'..='\u{205e}').contains(&c)
        || ('\u{3000}'..='\u{303f}').contains(&c)
}

/// Splits on whitespace, then splits every punctuation character into its
/// own token.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let mut current = String::new();
        for c in chunk.chars() {
            if is_punctuation(c) {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    TokenSequence(tokens)
}

/// Single-space join; the inverse of [`tokenize`] for scoring purposes.
pub fn detokenize(tokens: &TokenSequence) -> String {
    tokens.0.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &[&str]) -> TokenSequence {
        TokenSequence::from_strs(s).unwrap()
    }

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(tokenize("han går hem."), toks(&["han", "går", "hem", "."]));
    }

    #[test]
    fn empty_and_plain() {
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("a b"), toks(&["a", "b"]));
    }

    #[test]
    fn inner_punctuation_and_quotes() {
        assert_eq!(
            tokenize("«Hej», sa hon—igen!"),
            toks(&["«", "Hej", "»", ",", "sa", "hon", "—", "igen", "!"])
        );
    }

    #[test]
    fn rejects_bad_tokens() {
        assert!(TokenSequence::from_strs(&["a b"]).is_none());
        assert!(TokenSequence::from_strs(&[""]).is_none());
    }

    proptest! {
        #[test]
        fn retokenizing_is_idempotent(s in "[a-zåäö .,!?'\\-]{0,40}") {
            let once = tokenize(&s);
            let twice = tokenize(&detokenize(&once));
            prop_assert_eq!(once, twice);
        }
    }
}

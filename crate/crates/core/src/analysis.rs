//! English text analysis: lowercase, split on non-alphanumerics, drop
//! stopwords, Porter-stem.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::stem::stem_to_fixpoint;

/// Fixed English stopword list (sorted for binary search). `s` and `t`
/// absorb the tails of possessives and contractions split at the apostrophe.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in", "into", "is", "it",
    "no", "not", "of", "on", "or", "s", "such", "t", "that", "the", "their", "then", "there",
    "these", "they", "this", "to", "was", "will", "with",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// Normalized token sequence of a document or query.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnalyzedText {
    tokens: Vec<String>,
}

impl AnalyzedText {
    /// Wraps tokens that are already normalized (used for pre-tokenized input).
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            tokens: tokens.into_iter().map(Into::into).collect(),
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Multiset view: term -> occurrence count.
    pub fn term_counts(&self) -> BTreeMap<&str, u32> {
        let mut counts = BTreeMap::new();
        for t in &self.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
        counts
    }

    /// Concatenation of several texts, preserving order and duplicates.
    pub fn concat<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a AnalyzedText>,
    {
        let mut tokens = Vec::new();
        for p in parts {
            tokens.extend(p.tokens.iter().cloned());
        }
        Self { tokens }
    }

    pub fn join(&self, sep: &str) -> String {
        self.tokens.join(sep)
    }
}

/// Runs the analysis chain over raw text. Deterministic; never fails.
pub fn analyze(text: &str) -> AnalyzedText {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for raw in lowered.split(|c: char| !c.is_alphanumeric()) {
        if raw.is_empty() || is_stopword(raw) {
            continue;
        }
        let stemmed = stem_to_fixpoint(raw);
        if stemmed.is_empty() || is_stopword(&stemmed) {
            continue;
        }
        tokens.push(stemmed);
    }
    AnalyzedText { tokens }
}

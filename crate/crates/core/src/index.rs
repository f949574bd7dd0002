//! Immutable in-memory inverted index with collection statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalyzedText};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub term_counts: BTreeMap<String, u32>,
    pub length: u64,
}

impl DocumentRecord {
    pub fn from_analyzed(doc_id: impl Into<String>, text: &AnalyzedText) -> Self {
        let mut term_counts = BTreeMap::new();
        for t in text.tokens() {
            *term_counts.entry(t.clone()).or_insert(0u32) += 1;
        }
        Self {
            doc_id: doc_id.into(),
            term_counts,
            length: text.len() as u64,
        }
    }

    pub fn tf(&self, term: &str) -> u32 {
        self.term_counts.get(term).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionStats {
    pub total_tokens: u64,
    pub collection_tf: BTreeMap<String, u64>,
    pub doc_freq: BTreeMap<String, u32>,
    pub num_docs: u32,
}

impl CollectionStats {
    pub fn collection_tf(&self, term: &str) -> u64 {
        self.collection_tf.get(term).copied().unwrap_or(0)
    }

    pub fn doc_freq(&self, term: &str) -> u32 {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    /// Collection language model `tf(w, D) / |D|`; zero for an empty collection.
    pub fn collection_prob(&self, term: &str) -> f64 {
        if self.total_tokens == 0 {
            return 0.0;
        }
        self.collection_tf(term) as f64 / self.total_tokens as f64
    }

    /// Smoothed inverse document frequency `ln((N + 1) / (df + 0.5))`.
    pub fn idf(&self, term: &str) -> f64 {
        libm::log((self.num_docs as f64 + 1.0) / (self.doc_freq(term) as f64 + 0.5))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Position of the document in [`InvertedIndex::docs`].
    pub doc: u32,
    pub tf: u32,
}

/// Documents are stored sorted by id, so posting order by ordinal is also
/// ascending doc-id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<Posting>>,
    docs: Vec<DocumentRecord>,
    stats: CollectionStats,
}

impl InvertedIndex {
    /// Builds from already-analyzed documents.
    pub fn from_analyzed<I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, AnalyzedText)>,
        S: Into<String>,
    {
        let mut records: Vec<DocumentRecord> = docs
            .into_iter()
            .map(|(id, text)| DocumentRecord::from_analyzed(id, &text))
            .collect();
        records.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        if let Some(w) = records.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
            return Err(Error::DuplicateDocId(w[0].doc_id.clone()));
        }

        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut stats = CollectionStats {
            num_docs: records.len() as u32,
            ..CollectionStats::default()
        };
        for (ord, rec) in records.iter().enumerate() {
            stats.total_tokens += rec.length;
            for (term, &tf) in &rec.term_counts {
                postings.entry(term.clone()).or_default().push(Posting {
                    doc: ord as u32,
                    tf,
                });
                *stats.collection_tf.entry(term.clone()).or_insert(0) += tf as u64;
                *stats.doc_freq.entry(term.clone()).or_insert(0) += 1;
            }
        }
        Ok(Self {
            postings,
            docs: records,
            stats,
        })
    }

    pub fn stats(&self) -> &CollectionStats {
        &self.stats
    }

    pub fn docs(&self) -> &[DocumentRecord] {
        &self.docs
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_terms(&self) -> usize {
        self.postings.len()
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<usize> {
        self.docs
            .binary_search_by(|d| d.doc_id.as_str().cmp(doc_id))
            .ok()
    }

    pub fn doc(&self, doc_id: &str) -> Option<&DocumentRecord> {
        self.ordinal(doc_id).map(|i| &self.docs[i])
    }

    pub fn doc_at(&self, ordinal: u32) -> &DocumentRecord {
        &self.docs[ordinal as usize]
    }

    pub fn idf(&self, term: &str) -> f64 {
        self.stats.idf(term)
    }

    /// Checks every structural invariant; used after deserialization.
    pub fn validate(&self) -> core::result::Result<(), String> {
        use alloc::format;
        if self.docs.windows(2).any(|w| w[0].doc_id >= w[1].doc_id) {
            return Err("documents not sorted by unique id".into());
        }
        let mut total = 0u64;
        for d in &self.docs {
            let len: u64 = d.term_counts.values().map(|&c| c as u64).sum();
            if len != d.length {
                return Err(format!("length mismatch for `{}`", d.doc_id));
            }
            total += len;
        }
        if total != self.stats.total_tokens
            || self.stats.collection_tf.values().sum::<u64>() != total
            || self.stats.num_docs as usize != self.docs.len()
        {
            return Err("collection totals inconsistent".into());
        }
        for (term, list) in &self.postings {
            if list.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return Err(format!("postings for `{term}` not ascending"));
            }
            let mut cf = 0u64;
            for p in list {
                let Some(d) = self.docs.get(p.doc as usize) else {
                    return Err(format!("posting for `{term}` points past the doc table"));
                };
                if d.tf(term) != p.tf {
                    return Err(format!("tf mismatch for `{term}` in `{}`", d.doc_id));
                }
                cf += p.tf as u64;
            }
            if cf != self.stats.collection_tf(term)
                || list.len() as u32 != self.stats.doc_freq(term)
            {
                return Err(format!("collection stats inconsistent for `{term}`"));
            }
        }
        Ok(())
    }
}

/// Analyzes and indexes raw `(doc_id, text)` pairs.
pub fn build_index<I, S, T>(docs: I) -> Result<InvertedIndex>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    InvertedIndex::from_analyzed(docs.into_iter().map(|(id, text)| (id, analyze(text.as_ref()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn toks(s: &str) -> AnalyzedText {
        AnalyzedText::from_tokens(s.split_whitespace())
    }

    #[test]
    fn empty_index() {
        let idx = build_index(Vec::<(String, String)>::new()).unwrap();
        assert_eq!(idx.stats().total_tokens, 0);
        assert_eq!(idx.num_docs(), 0);
        assert_eq!(idx.stats().collection_prob("x"), 0.0);
    }

    #[test]
    fn two_doc_counts() {
        let idx = InvertedIndex::from_analyzed([("d1", toks("a a b")), ("d2", toks("b c"))]).unwrap();
        let s = idx.stats();
        assert_eq!(s.total_tokens, 5);
        assert_eq!(
            s.collection_tf.iter().map(|(k, v)| (k.as_str(), *v)).collect::<Vec<_>>(),
            vec![("a", 2), ("b", 2), ("c", 1)]
        );
        assert_eq!(
            s.doc_freq.iter().map(|(k, v)| (k.as_str(), *v)).collect::<Vec<_>>(),
            vec![("a", 1), ("b", 2), ("c", 1)]
        );
        assert_eq!(idx.postings("b"), &[Posting { doc: 0, tf: 1 }, Posting { doc: 1, tf: 1 }]);
        idx.validate().unwrap();
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = build_index([("d1", "x"), ("d2", "y"), ("d1", "z")]).unwrap_err();
        assert_eq!(err, Error::DuplicateDocId("d1".into()));
    }

    #[test]
    fn idf_values() {
        let one = InvertedIndex::from_analyzed([("d", toks("a"))]).unwrap();
        assert!((one.idf("a") - libm::log(2.0 / 1.5)).abs() < 1e-12);
        assert!((one.idf("a") - 0.2877).abs() < 1e-4);

        let nine = InvertedIndex::from_analyzed(
            (0..9).map(|i| (alloc::format!("d{i}"), toks("x"))),
        )
        .unwrap();
        assert!((nine.idf("unseen") - libm::log(20.0)).abs() < 1e-12);
        // ubiquitous term: positive, shrinking towards zero
        assert!(nine.idf("x") > 0.0 && nine.idf("x") < one.idf("a"));
    }

    #[test]
    fn rebuild_is_identical() {
        let docs = [("b", "lava flows"), ("a", "volcanic lava"), ("c", "flows of water")];
        assert_eq!(build_index(docs).unwrap(), build_index(docs).unwrap());
    }

    proptest! {
        #[test]
        fn invariants_hold(docs in proptest::collection::btree_map(
            "[a-z]{1,3}", proptest::collection::vec("[a-e]{1,2}", 0..12), 0..8)) {
            let idx = InvertedIndex::from_analyzed(
                docs.iter().map(|(id, t)| (id.clone(), AnalyzedText::from_tokens(t.clone())))).unwrap();
            prop_assert!(idx.validate().is_ok());
            for term in idx.terms() {
                let df = idx.stats().doc_freq(term);
                prop_assert!(df >= 1 && df <= idx.stats().num_docs);
                let sum: u64 = idx.postings(term).iter().map(|p| p.tf as u64).sum();
                prop_assert_eq!(sum, idx.stats().collection_tf(term));
            }
        }
    }
}

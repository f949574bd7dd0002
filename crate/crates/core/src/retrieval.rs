//! Ranked lists and initial query-likelihood retrieval.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzedText;
use crate::index::{DocumentRecord, InvertedIndex};
use crate::lm::query_log_likelihood;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
}

/// Documents ordered by descending score, ties by ascending doc id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    entries: Vec<ScoredDoc>,
}

impl RankedList {
    /// Sorts the input into canonical order. Later duplicates of a doc id are dropped.
    pub fn new(mut entries: Vec<ScoredDoc>) -> Self {
        let mut seen = BTreeSet::new();
        entries.retain(|e| seen.insert(e.doc_id.clone()));
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id)));
        Self { entries }
    }

    /// Keeps the given order as-is (e.g. read back from a run file).
    pub fn from_ordered(entries: Vec<ScoredDoc>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[ScoredDoc] {
        &self.entries
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&mut self, depth: usize) {
        self.entries.truncate(depth);
    }

    pub fn top(&self, n: usize) -> &[ScoredDoc] {
        &self.entries[..n.min(self.entries.len())]
    }
}

/// Top-`depth` documents by Dirichlet query likelihood. Candidates are the
/// documents containing at least one query term.
pub fn retrieve(query: &AnalyzedText, index: &InvertedIndex, mu: f64, depth: usize) -> RankedList {
    let mut ordinals = BTreeSet::new();
    for term in query.term_counts().keys() {
        ordinals.extend(index.postings(term).iter().map(|p| p.doc));
    }
    let stats = index.stats();
    let scored = ordinals
        .into_iter()
        .map(|ord| {
            let d = index.doc_at(ord);
            ScoredDoc {
                doc_id: d.doc_id.clone(),
                score: query_log_likelihood(query, d, stats, mu),
            }
        })
        .collect();
    let mut list = RankedList::new(scored);
    list.truncate(depth);
    list
}

/// Re-scores candidates as `initial score + extra(doc)` and re-sorts.
pub fn rerank_by<F>(candidates: &RankedList, index: &InvertedIndex, mut extra: F) -> Result<RankedList>
where
    F: FnMut(&DocumentRecord) -> f64,
{
    let mut out = Vec::with_capacity(candidates.len());
    for c in candidates.entries() {
        let doc = index.doc(&c.doc_id).ok_or_else(|| Error::UnknownDoc(c.doc_id.clone()))?;
        out.push(ScoredDoc {
            doc_id: c.doc_id.clone(),
            score: c.score + extra(doc),
        });
    }
    Ok(RankedList::new(out))
}

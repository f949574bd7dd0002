//! Recorded search sessions, query-change classification and feedback-set
//! selection.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalyzedText};
use crate::index::InvertedIndex;
use crate::lm::query_log_likelihood;
use crate::{Error, Result};

/// A query as typed plus its analyzed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionQuery {
    pub raw: String,
    pub analyzed: AnalyzedText,
}

impl SessionQuery {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let analyzed = analyze(&raw);
        Self { raw, analyzed }
    }

    /// Pre-tokenized query; the raw text is the tokens joined by spaces.
    pub fn from_tokens(analyzed: AnalyzedText) -> Self {
        Self {
            raw: analyzed.join(" "),
            analyzed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Click {
    pub doc: String,
    /// Stored for completeness; no scoring path reads it.
    pub dwell: Option<f64>,
}

/// One recorded step: a query, the results shown for it and the clicks on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStep {
    pub query: SessionQuery,
    pub impressions: Vec<String>,
    pub clicks: Vec<Click>,
}

impl SessionStep {
    pub fn new(query: SessionQuery, impressions: Vec<String>, clicks: Vec<Click>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for d in &impressions {
            if !seen.insert(d.as_str()) {
                return Err(Error::InvalidSession(format!("duplicate impression `{d}`")));
            }
        }
        for c in &clicks {
            if !seen.contains(c.doc.as_str()) {
                return Err(Error::InvalidSession(format!("clicked `{}` was not shown", c.doc)));
            }
        }
        Ok(Self {
            query,
            impressions,
            clicks,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub topic_id: String,
    /// Steps `1..n-1`.
    pub history: Vec<SessionStep>,
    /// The current query `q_n`.
    pub current: SessionQuery,
}

impl Session {
    /// Number of queries including the current one.
    pub fn n(&self) -> usize {
        self.history.len() + 1
    }

    /// Query at step `t` (1-based; `t = n` is the current query).
    pub fn query(&self, t: usize) -> &SessionQuery {
        assert!(t >= 1 && t <= self.n(), "step {t} out of range 1..={}", self.n());
        if t == self.n() {
            &self.current
        } else {
            &self.history[t - 1].query
        }
    }

    pub fn queries(&self) -> impl Iterator<Item = &SessionQuery> {
        self.history.iter().map(|s| &s.query).chain(core::iter::once(&self.current))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChangeType {
    Retain,
    Add,
    Remove,
}

impl ChangeType {
    pub const ALL: [ChangeType; 3] = [ChangeType::Retain, ChangeType::Add, ChangeType::Remove];
}

/// Partition of the unique terms of two consecutive queries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryChange {
    pub retained: BTreeSet<String>,
    pub added: BTreeSet<String>,
    pub removed: BTreeSet<String>,
}

impl QueryChange {
    pub fn terms(&self, kind: ChangeType) -> &BTreeSet<String> {
        match kind {
            ChangeType::Retain => &self.retained,
            ChangeType::Add => &self.added,
            ChangeType::Remove => &self.removed,
        }
    }
}

fn term_set(t: &AnalyzedText) -> BTreeSet<String> {
    t.tokens().iter().cloned().collect()
}

/// Classifies terms of `current` against the previous query. With no
/// previous query every term counts as added.
pub fn classify_change(previous: Option<&AnalyzedText>, current: &AnalyzedText) -> Result<QueryChange> {
    if current.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let cur = term_set(current);
    let prev = previous.map(term_set).unwrap_or_default();
    Ok(QueryChange {
        retained: cur.intersection(&prev).cloned().collect(),
        added: cur.difference(&prev).cloned().collect(),
        removed: prev.difference(&cur).cloned().collect(),
    })
}

/// Concatenated token multiset of all observed queries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoInfoNeed {
    pub tokens: AnalyzedText,
}

pub fn pseudo_info_need<'a, I>(queries: I) -> PseudoInfoNeed
where
    I: IntoIterator<Item = &'a SessionQuery>,
{
    PseudoInfoNeed {
        tokens: AnalyzedText::concat(queries.into_iter().map(|q| &q.analyzed)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeedbackSource {
    Clicks,
    Pseudo,
    /// No impressions were available; the step has no feedback.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackSet {
    pub doc_ids: Vec<String>,
    pub source: FeedbackSource,
}

impl FeedbackSet {
    pub fn empty() -> Self {
        Self {
            doc_ids: Vec::new(),
            source: FeedbackSource::Empty,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }
}

fn usable(index: &InvertedIndex, doc_id: &str) -> bool {
    index.doc(doc_id).is_some_and(|d| d.length > 0)
}

/// Feedback documents for step `t` (1-based, `t <= n`).
///
/// Clicks anywhere in steps `1..=min(t, n-1)` switch the source to their
/// union. Otherwise the top-`m` shown documents by query likelihood against
/// the concatenation of queries `1..=t` are used as pseudo-clicks. Documents
/// missing from the index (or empty) are never selected.
pub fn select_feedback_docs(session: &Session, t: usize, m: usize, mu: f64, index: &InvertedIndex) -> Result<FeedbackSet> {
    if t == 0 || t > session.n() {
        return Err(Error::InvalidParam(format!("step {t} outside 1..={}", session.n())));
    }
    let prefix = &session.history[..t.min(session.n() - 1)];

    let mut clicked = Vec::new();
    let mut seen = BTreeSet::new();
    for step in prefix {
        for c in &step.clicks {
            if usable(index, &c.doc) && seen.insert(c.doc.as_str()) {
                clicked.push(c.doc.clone());
            }
        }
    }
    if !clicked.is_empty() {
        return Ok(FeedbackSet {
            doc_ids: clicked,
            source: FeedbackSource::Clicks,
        });
    }

    let shown: BTreeSet<&str> = prefix
        .iter()
        .flat_map(|s| s.impressions.iter().map(String::as_str))
        .filter(|d| usable(index, d))
        .collect();
    if shown.is_empty() {
        return Ok(FeedbackSet::empty());
    }
    let need = pseudo_info_need((1..=t).map(|j| session.query(j)));
    let mut scored: Vec<(&str, f64)> = shown
        .into_iter()
        .map(|d| {
            let rec = index.doc(d).expect("filtered to indexed docs");
            (d, query_log_likelihood(&need.tokens, rec, index.stats(), mu))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(FeedbackSet {
        doc_ids: scored.into_iter().take(m).map(|(d, _)| String::from(d)).collect(),
        source: FeedbackSource::Pseudo,
    })
}

//! Graded relevance metrics: nDCG, nERR, MRR and average precision.
//!
//! Gains are `2^g - 1`, the DCG discount is `log2(rank + 1)` and unjudged
//! documents have grade zero.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::retrieval::RankedList;
use crate::{Error, Result};

/// Per-topic judgments: doc id -> grade.
pub type Judgments = BTreeMap<String, u32>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qrels {
    pub topics: BTreeMap<String, Judgments>,
}

impl Qrels {
    pub fn insert(&mut self, topic: impl Into<String>, doc: impl Into<String>, grade: u32) {
        self.topics.entry(topic.into()).or_default().insert(doc.into(), grade);
    }

    pub fn topic(&self, topic: &str) -> Result<&Judgments> {
        self.topics.get(topic).ok_or_else(|| Error::UnknownTopic(topic.into()))
    }

    pub fn max_grade(&self) -> u32 {
        self.topics.values().flat_map(|j| j.values().copied()).max().unwrap_or(0)
    }
}

fn grade(j: &Judgments, doc: &str) -> u32 {
    j.get(doc).copied().unwrap_or(0)
}

fn gain(g: u32) -> f64 {
    libm::exp2(g as f64) - 1.0
}

fn dcg<I: IntoIterator<Item = u32>>(grades: I, k: usize) -> f64 {
    grades
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, g)| gain(g) / libm::log2(i as f64 + 2.0))
        .sum()
}

fn ideal_grades(j: &Judgments) -> Vec<u32> {
    let mut g: Vec<u32> = j.values().copied().filter(|g| *g > 0).collect();
    g.sort_unstable_by(|a, b| b.cmp(a));
    g
}

/// nDCG at cutoff `k`; the ideal ranking is also truncated at `k`.
pub fn ndcg_at_k(ranking: &RankedList, j: &Judgments, k: usize) -> f64 {
    let ideal = dcg(ideal_grades(j), k);
    if ideal <= 0.0 {
        return 0.0;
    }
    dcg(ranking.doc_ids().map(|d| grade(j, d)), k) / ideal
}

fn err<I: IntoIterator<Item = u32>>(grades: I, k: usize, g_max: u32) -> f64 {
    let scale = libm::exp2(g_max as f64);
    let mut not_stopped = 1.0;
    let mut total = 0.0;
    for (i, g) in grades.into_iter().take(k).enumerate() {
        let r = gain(g) / scale;
        total += not_stopped * r / (i as f64 + 1.0);
        not_stopped *= 1.0 - r;
    }
    total
}

/// Expected reciprocal rank at `k`, normalized by its ideal value.
/// `g_max` must be at least the highest grade in the judgments.
pub fn nerr_at_k(ranking: &RankedList, j: &Judgments, k: usize, g_max: u32) -> f64 {
    let ideal = err(ideal_grades(j), k, g_max);
    if ideal <= 0.0 {
        return 0.0;
    }
    err(ranking.doc_ids().map(|d| grade(j, d)), k, g_max) / ideal
}

/// Reciprocal rank of the first document with a positive grade.
pub fn mrr(ranking: &RankedList, j: &Judgments) -> f64 {
    ranking
        .doc_ids()
        .position(|d| grade(j, d) > 0)
        .map_or(0.0, |i| 1.0 / (i as f64 + 1.0))
}

/// Average precision with binary relevance (grade > 0), normalized by the
/// number of relevant documents in the judgments.
pub fn mean_average_precision(ranking: &RankedList, j: &Judgments) -> f64 {
    let total_rel = j.values().filter(|g| **g > 0).count();
    if total_rel == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, d) in ranking.doc_ids().enumerate() {
        if grade(j, d) > 0 {
            hits += 1;
            sum += hits as f64 / (i as f64 + 1.0);
        }
    }
    sum / total_rel as f64
}

/// Metric cutoffs shared by every evaluated session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSettings {
    /// Cutoff for nDCG@k and nERR@k.
    pub k: usize,
    /// Cutoff for full-depth nDCG (ideal truncated at the same depth).
    pub depth: usize,
    pub g_max: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub ndcg_at_k: f64,
    pub ndcg: f64,
    pub nerr_at_k: f64,
    pub mrr: f64,
    pub map: f64,
}

impl Metrics {
    pub fn compute(ranking: &RankedList, j: &Judgments, s: &EvalSettings) -> Self {
        Self {
            ndcg_at_k: ndcg_at_k(ranking, j, s.k),
            ndcg: ndcg_at_k(ranking, j, s.depth),
            nerr_at_k: nerr_at_k(ranking, j, s.k, s.g_max),
            mrr: mrr(ranking, j),
            map: mean_average_precision(ranking, j),
        }
    }

    pub fn mean(all: &[Metrics]) -> Self {
        if all.is_empty() {
            return Self::default();
        }
        let n = all.len() as f64;
        let sum = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        Self {
            ndcg_at_k: sum(|m| m.ndcg_at_k),
            ndcg: sum(|m| m.ndcg),
            nerr_at_k: sum(|m| m.nerr_at_k),
            mrr: sum(|m| m.mrr),
            map: sum(|m| m.map),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    pub session_id: String,
    pub topic_id: String,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub settings: EvalSettings,
    pub sessions: Vec<SessionMetrics>,
    pub mean: Metrics,
}

impl MetricsReport {
    pub fn new(settings: EvalSettings, sessions: Vec<SessionMetrics>) -> Self {
        let all: Vec<Metrics> = sessions.iter().map(|s| s.metrics).collect();
        Self {
            settings,
            mean: Metrics::mean(&all),
            sessions,
        }
    }
}

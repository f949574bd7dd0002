//! Comparison systems: RM1/RM3 relevance models and query aggregation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzedText;
use crate::index::{CollectionStats, DocumentRecord, InvertedIndex};
use crate::lm::{query_log_likelihood, TermDistribution, DEFAULT_MU};
use crate::retrieval::retrieve;
use crate::session::Session;
use crate::srm::{interpolate_with_query, weighted_doc_mixture};
use crate::{Error, Result};

/// Recency decay used for query aggregation.
pub const DEFAULT_DECAY: f64 = 0.92;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMethod {
    Rm3Qn,
    Rm3Qprime,
    QaUniform,
    QaDecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    pub m: usize,
    pub lambda: f64,
    pub decay: f64,
    pub mu: f64,
    pub clip_terms: usize,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod) -> Self {
        Self {
            method,
            m: 10,
            lambda: 0.5,
            decay: DEFAULT_DECAY,
            mu: DEFAULT_MU,
            clip_terms: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidParam(format!("decay must lie in (0, 1], got {}", self.decay)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParam(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if self.clip_terms == 0 {
            return Err(Error::InvalidParam("clip_terms must be >= 1".into()));
        }
        Ok(())
    }
}

/// Normalized `p(d|q)` over the given documents from their query
/// log-likelihoods; uniform when no document can generate the query.
pub fn query_posteriors(query: &AnalyzedText, docs: &[&DocumentRecord], stats: &CollectionStats, mu: f64) -> Vec<f64> {
    let lls: Vec<f64> = docs.iter().map(|d| query_log_likelihood(query, d, stats, mu)).collect();
    let max = lls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return alloc::vec![1.0 / docs.len() as f64; docs.len()];
    }
    let exps: Vec<f64> = lls.iter().map(|l| libm::exp(l - max)).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// RM1: `sum_d p^[0](w|d) p(d|q)` over the feedback documents.
pub fn rm1_model(query: &AnalyzedText, feedback_docs: &[String], index: &InvertedIndex, mu: f64) -> Result<TermDistribution> {
    if feedback_docs.is_empty() {
        return Err(Error::EmptyFeedback);
    }
    let docs = feedback_docs
        .iter()
        .map(|d| index.doc(d).ok_or_else(|| Error::UnknownDoc(d.clone())))
        .collect::<Result<Vec<_>>>()?;
    let post = query_posteriors(query, &docs, index.stats(), mu);
    Ok(weighted_doc_mixture(docs.into_iter().zip(post)))
}

/// RM3: RM1 interpolated with the query MLE, clipped to `clip_terms` terms.
pub fn rm3_model(
    query: &AnalyzedText,
    feedback_docs: &[String],
    index: &InvertedIndex,
    mu: f64,
    lambda: f64,
    clip_terms: usize,
) -> Result<TermDistribution> {
    let rm1 = rm1_model(query, feedback_docs, index, mu)?;
    Ok(interpolate_with_query(&rm1, query, lambda).clip(clip_terms))
}

/// Top-`m` documents of a fresh query-likelihood retrieval for `query`.
pub fn retrieve_feedback(query: &AnalyzedText, index: &InvertedIndex, mu: f64, m: usize) -> Vec<String> {
    retrieve(query, index, mu, m).doc_ids().map(String::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregation {
    /// Query likelihood of all session queries concatenated.
    Uniform,
    /// `sum_t decay^(n-t) * ll(q_t)`.
    Decay(f64),
}

pub fn qa_score(session: &Session, doc: &DocumentRecord, stats: &CollectionStats, mu: f64, agg: Aggregation) -> f64 {
    match agg {
        Aggregation::Uniform => {
            let all = AnalyzedText::concat(session.queries().map(|q| &q.analyzed));
            query_log_likelihood(&all, doc, stats, mu)
        }
        Aggregation::Decay(decay) => {
            let n = session.n();
            let mut score = 0.0;
            for (i, q) in session.queries().enumerate() {
                let weight = libm::pow(decay, (n - 1 - i) as f64);
                score += weight * query_log_likelihood(&q.analyzed, doc, stats, mu);
            }
            score
        }
    }
}

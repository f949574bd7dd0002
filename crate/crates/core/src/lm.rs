//! Language-model primitives: term distributions, Dirichlet smoothing,
//! query likelihood, KL divergence and query similarity.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzedText;
use crate::index::{CollectionStats, DocumentRecord, InvertedIndex};
use crate::{Error, Result};

/// Customary Dirichlet pseudo-count for ad hoc retrieval.
pub const DEFAULT_MU: f64 = 2500.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub mu: f64,
}

impl SmoothingConfig {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParam(alloc::format!("mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self { mu })
    }
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self { mu: DEFAULT_MU }
    }
}

/// Sparse probability distribution over terms.
///
/// The empty distribution is the distinguished zero model; every other value
/// has strictly positive entries summing to one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermDistribution {
    probs: BTreeMap<String, f64>,
}

impl TermDistribution {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.probs.is_empty()
    }

    /// Normalizes non-negative weights. Non-positive weights are dropped; an
    /// all-zero input yields the zero model.
    pub fn from_weights<I, S>(weights: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut probs: BTreeMap<String, f64> = BTreeMap::new();
        for (term, w) in weights {
            if w > 0.0 {
                *probs.entry(term.into()).or_insert(0.0) += w;
            }
        }
        let total: f64 = probs.values().sum();
        if total > 0.0 {
            for p in probs.values_mut() {
                *p /= total;
            }
        }
        Self { probs }
    }

    /// Maximum-likelihood model of a token sequence.
    pub fn mle(text: &AnalyzedText) -> Self {
        Self::from_weights(text.term_counts().into_iter().map(|(t, c)| (t, c as f64)))
    }

    /// Maximum-likelihood document model `p^[0](.|d)`.
    pub fn doc_mle(doc: &DocumentRecord) -> Self {
        Self::from_weights(doc.term_counts.iter().map(|(t, &c)| (t.as_str(), c as f64)))
    }

    pub fn prob(&self, term: &str) -> f64 {
        self.probs.get(term).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(t, &p)| (t.as_str(), p))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Termwise `wa * a + wb * b` over the union support, without renormalizing.
    pub fn mix(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        let mut probs = BTreeMap::new();
        for (t, p) in a.iter() {
            *probs.entry(String::from(t)).or_insert(0.0) += wa * p;
        }
        for (t, p) in b.iter() {
            *probs.entry(String::from(t)).or_insert(0.0) += wb * p;
        }
        probs.retain(|_, p| *p > 0.0);
        Self { probs }
    }

    /// Terms by descending probability, ties by term.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn top_terms(&self, n: usize) -> Vec<(String, f64)> {
        self.ranked()
            .into_iter()
            .take(n)
            .map(|(t, p)| (String::from(t), p))
            .collect()
    }

    /// Keeps the `n` most probable terms and renormalizes.
    pub fn clip(&self, n: usize) -> Self {
        if self.len() <= n {
            return self.clone();
        }
        Self::from_weights(self.ranked().into_iter().take(n))
    }
}

/// `(tf + mu * p_c) / (len + mu)`; errors when both `len` and `mu` are zero.
pub fn dirichlet(tf: f64, len: f64, collection_prob: f64, mu: f64) -> Result<f64> {
    let denom = len + mu;
    if denom <= 0.0 {
        return Err(Error::UndefinedSmoothing);
    }
    Ok((tf + mu * collection_prob) / denom)
}

/// Dirichlet-smoothed `p^[mu](term | doc)`; `mu = 0` gives the MLE.
pub fn smoothed_prob(term: &str, doc: &DocumentRecord, stats: &CollectionStats, mu: f64) -> Result<f64> {
    let pc = if mu > 0.0 { stats.collection_prob(term) } else { 0.0 };
    dirichlet(doc.tf(term) as f64, doc.length as f64, pc, mu)
}

fn ln_or_neg_inf(p: Result<f64>) -> f64 {
    match p {
        Ok(p) if p > 0.0 => libm::log(p),
        _ => f64::NEG_INFINITY,
    }
}

/// Sum of log smoothed probabilities over query token occurrences.
/// Returns `-inf` when any query term has zero (or undefined) probability.
pub fn query_log_likelihood(query: &AnalyzedText, doc: &DocumentRecord, stats: &CollectionStats, mu: f64) -> f64 {
    let mut score = 0.0;
    for (term, qtf) in query.term_counts() {
        score += qtf as f64 * ln_or_neg_inf(smoothed_prob(term, doc, stats, mu));
    }
    score
}

/// `sum_w P(w) ln(P(w)/Q(w))`; `+inf` when `Q` misses any of `P`'s support.
pub fn kl_divergence(p: &TermDistribution, q: &TermDistribution) -> f64 {
    let mut kl = 0.0;
    for (term, pw) in p.iter() {
        let qw = q.prob(term);
        if qw <= 0.0 {
            return f64::INFINITY;
        }
        kl += pw * libm::log(pw / qw);
    }
    // rounding can leave tiny negatives for (near-)identical inputs
    kl.max(0.0)
}

/// Cross-entropy document score `sum_w p(w|model) ln p^[mu](w|d)`, the
/// rank-equivalent form of negative KL divergence. Higher is better.
pub fn cross_entropy_score(model: &TermDistribution, doc: &DocumentRecord, stats: &CollectionStats, mu: f64) -> f64 {
    let mut score = 0.0;
    for (term, pw) in model.iter() {
        score += pw * ln_or_neg_inf(smoothed_prob(term, doc, stats, mu));
    }
    score
}

/// Source of inverse document frequencies.
pub trait IdfSource {
    fn idf(&self, term: &str) -> f64;
}

impl IdfSource for CollectionStats {
    fn idf(&self, term: &str) -> f64 {
        CollectionStats::idf(self, term)
    }
}

impl IdfSource for InvertedIndex {
    fn idf(&self, term: &str) -> f64 {
        InvertedIndex::idf(self, term)
    }
}

impl<F: Fn(&str) -> f64> IdfSource for F {
    fn idf(&self, term: &str) -> f64 {
        self(term)
    }
}

/// idf-weighted Generalized-Jaccard similarity of two query multisets.
pub fn generalized_jaccard_sim(a: &AnalyzedText, b: &AnalyzedText, idf: &impl IdfSource) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::EmptyQueries);
    }
    let ca = a.term_counts();
    let cb = b.term_counts();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut ia = ca.iter().peekable();
    let mut ib = cb.iter().peekable();
    // merge over the sorted union
    loop {
        let (term, ta, tb) = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some((t, &x)), None) => {
                let r = (**t, x, 0);
                ia.next();
                r
            }
            (None, Some((t, &y))) => {
                let r = (**t, 0, y);
                ib.next();
                r
            }
            (Some((t, &x)), Some((u, &y))) => match t.cmp(u) {
                Ordering::Less => {
                    let r = (**t, x, 0);
                    ia.next();
                    r
                }
                Ordering::Greater => {
                    let r = (**u, 0, y);
                    ib.next();
                    r
                }
                Ordering::Equal => {
                    let r = (**t, x, y);
                    ia.next();
                    ib.next();
                    r
                }
            },
        };
        let w = idf.idf(term);
        num += ta.min(tb) as f64 * w;
        den += ta.max(tb) as f64 * w;
    }
    if den <= 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

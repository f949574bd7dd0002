//! The session relevance model.
//!
//! For every step `t = 1..n` of a session the model is updated as
//!
//! ```text
//! theta_S(t) = gamma_t * theta_S(t-1) + (1 - gamma_t) * theta'_F(t)
//! gamma_t    = gamma * exp(-KL(theta'_F(t) || theta_S(t-1)))
//! ```
//!
//! starting from the zero model, where `theta'_F(t)` is a feedback model
//! anchored to the step query. The feedback model weights each feedback
//! document by how well it explains the terms the user retained, added and
//! removed when moving from `q_{t-1}` to `q_t`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzedText;
use crate::baselines::rm1_model;
use crate::index::{CollectionStats, DocumentRecord, InvertedIndex};
use crate::lm::{cross_entropy_score, generalized_jaccard_sim, kl_divergence, smoothed_prob, IdfSource, TermDistribution, DEFAULT_MU};
use crate::retrieval::{rerank_by, RankedList};
use crate::session::{classify_change, select_feedback_docs, ChangeType, FeedbackSet, QueryChange, Session};
use crate::{Error, Result};

/// Prior odds of each query-change action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangePriors {
    pub retain: f64,
    pub add: f64,
    pub remove: f64,
}

impl ChangePriors {
    pub fn get(&self, kind: ChangeType) -> f64 {
        match kind {
            ChangeType::Retain => self.retain,
            ChangeType::Add => self.add,
            ChangeType::Remove => self.remove,
        }
    }
}

impl Default for ChangePriors {
    fn default() -> Self {
        Self {
            retain: 1.0 / 3.0,
            add: 1.0 / 3.0,
            remove: 1.0 / 3.0,
        }
    }
}

/// How feedback documents are weighted inside the per-step feedback model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Query-change likelihoods.
    Qc,
    /// Query likelihood of the current query (RM1 document score).
    Rm1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrmParams {
    pub gamma: f64,
    pub lambda: f64,
    pub m: usize,
    pub mu: f64,
    pub change_priors: ChangePriors,
    pub clip_terms: usize,
    pub variant: Variant,
}

impl Default for SrmParams {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            lambda: 0.5,
            m: 10,
            mu: DEFAULT_MU,
            change_priors: ChangePriors::default(),
            clip_terms: 100,
            variant: Variant::Qc,
        }
    }
}

impl SrmParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParam(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("gamma", self.gamma)?;
        unit("lambda", self.lambda)?;
        if !self.mu.is_finite() || self.mu < 0.0 {
            return Err(Error::InvalidParam(format!("mu must be finite and >= 0, got {}", self.mu)));
        }
        if self.clip_terms == 0 {
            return Err(Error::InvalidParam("clip_terms must be >= 1".into()));
        }
        let p = self.change_priors;
        if [p.retain, p.add, p.remove].iter().any(|v| *v < 0.0 || !v.is_finite())
            || ((p.retain + p.add + p.remove) - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidParam("change priors must be non-negative and sum to 1".into()));
        }
        Ok(())
    }
}

/// Likelihood that a document explains a set of changed terms: the product
/// of smoothed probabilities for retained/added terms, and the clamped mass
/// left over by removed terms.
pub fn change_likelihood(
    terms: &BTreeSet<String>,
    kind: ChangeType,
    doc: &DocumentRecord,
    stats: &CollectionStats,
    mu: f64,
) -> Result<f64> {
    match kind {
        ChangeType::Retain | ChangeType::Add => {
            let mut p = 1.0;
            for t in terms {
                p *= smoothed_prob(t, doc, stats, mu)?;
            }
            Ok(p)
        }
        ChangeType::Remove => {
            let mut mass = 0.0;
            for t in terms {
                mass += smoothed_prob(t, doc, stats, 0.0)?;
            }
            Ok((1.0 - mass).max(0.0))
        }
    }
}

fn feedback_docs<'a>(feedback: &FeedbackSet, index: &'a InvertedIndex) -> Result<Vec<&'a DocumentRecord>> {
    if feedback.is_empty() {
        return Err(Error::EmptyFeedback);
    }
    feedback
        .doc_ids
        .iter()
        .map(|d| index.doc(d).ok_or_else(|| Error::UnknownDoc(d.clone())))
        .collect()
}

fn normalize_or_uniform(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    } else {
        let u = 1.0 / weights.len() as f64;
        weights.iter_mut().for_each(|w| *w = u);
    }
}

/// `p(d | change)` over the feedback set: normalized change likelihoods,
/// uniform if every likelihood is zero.
pub fn doc_change_posterior(
    terms: &BTreeSet<String>,
    kind: ChangeType,
    feedback: &FeedbackSet,
    index: &InvertedIndex,
    mu: f64,
) -> Result<Vec<(String, f64)>> {
    let docs = feedback_docs(feedback, index)?;
    let mut w = docs
        .iter()
        .map(|d| change_likelihood(terms, kind, d, index.stats(), mu))
        .collect::<Result<Vec<_>>>()?;
    normalize_or_uniform(&mut w);
    Ok(feedback.doc_ids.iter().cloned().zip(w).collect())
}

/// `sum_d weight_d * p^[0](.|d)` with weights summing to one.
pub fn weighted_doc_mixture<'a, I>(docs: I) -> TermDistribution
where
    I: IntoIterator<Item = (&'a DocumentRecord, f64)>,
{
    let mut acc: BTreeMap<&str, f64> = BTreeMap::new();
    for (doc, weight) in docs {
        if weight <= 0.0 || doc.length == 0 {
            continue;
        }
        let len = doc.length as f64;
        for (term, &tf) in &doc.term_counts {
            *acc.entry(term.as_str()).or_insert(0.0) += weight * tf as f64 / len;
        }
    }
    TermDistribution::from_weights(acc)
}

/// Query-change feedback model. Change types with no terms are left out and
/// the priors of the remaining types are renormalized.
pub fn feedback_model(
    change: &QueryChange,
    feedback: &FeedbackSet,
    priors: &ChangePriors,
    index: &InvertedIndex,
    mu: f64,
) -> Result<TermDistribution> {
    let docs = feedback_docs(feedback, index)?;
    let active: Vec<ChangeType> = ChangeType::ALL
        .into_iter()
        .filter(|k| !change.terms(*k).is_empty())
        .collect();
    if active.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let prior_mass: f64 = active.iter().map(|k| priors.get(*k)).sum();
    let mut doc_weight = alloc::vec![0.0; docs.len()];
    for kind in &active {
        let prior = if prior_mass > 0.0 {
            priors.get(*kind) / prior_mass
        } else {
            1.0 / active.len() as f64
        };
        let post = doc_change_posterior(change.terms(*kind), *kind, feedback, index, mu)?;
        for (w, (_, p)) in doc_weight.iter_mut().zip(post) {
            *w += p * prior;
        }
    }
    Ok(weighted_doc_mixture(docs.into_iter().zip(doc_weight)))
}

/// Anchoring weight `lambda * sim(q_t, q_n)`.
pub fn anchor_weight(q_t: &AnalyzedText, q_n: &AnalyzedText, lambda: f64, idf: &impl IdfSource) -> Result<f64> {
    Ok(lambda * generalized_jaccard_sim(q_t, q_n, idf)?)
}

/// `(1 - w) * p^[0](.|q_t) + w * fm`.
pub fn interpolate_with_query(fm: &TermDistribution, q_t: &AnalyzedText, weight: f64) -> TermDistribution {
    TermDistribution::mix(&TermDistribution::mle(q_t), 1.0 - weight, fm, weight)
}

/// Anchors a feedback model to the step query, weighted by the step query's
/// similarity to the current query.
pub fn anchor_feedback(
    fm: &TermDistribution,
    q_t: &AnalyzedText,
    q_n: &AnalyzedText,
    lambda: f64,
    idf: &impl IdfSource,
) -> Result<TermDistribution> {
    if q_t.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok(interpolate_with_query(fm, q_t, anchor_weight(q_t, q_n, lambda, idf)?))
}

/// Self-clarity weight `gamma * exp(-KL(anchored || prior))` and the KL
/// value it was computed from. An infinite KL (e.g. a zero prior) gives 0.
pub fn self_clarity_gamma(anchored: &TermDistribution, prior: &TermDistribution, gamma: f64) -> (f64, f64) {
    let kl = kl_divergence(anchored, prior);
    let g = if kl.is_infinite() { 0.0 } else { gamma * libm::exp(-kl) };
    (g, kl)
}

/// `gamma_t * prior + (1 - gamma_t) * anchored`.
pub fn srm_update(prior: &TermDistribution, anchored: &TermDistribution, gamma_t: f64) -> TermDistribution {
    TermDistribution::mix(prior, gamma_t, anchored, 1.0 - gamma_t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub t: usize,
    pub query: String,
    /// Set when the step query analyzed to nothing and left the model as is.
    pub skipped: bool,
    pub change: QueryChange,
    pub feedback: FeedbackSet,
    pub gamma_t: f64,
    pub lambda_t: f64,
    /// `None` when the divergence is infinite.
    pub kl: Option<f64>,
    pub top_terms: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SrmTrace {
    pub session_id: String,
    pub steps: Vec<StepTrace>,
}

const TRACE_TERMS: usize = 10;

/// Builds the clipped session model for the current query of `session`.
pub fn build_session_model(
    session: &Session,
    params: &SrmParams,
    index: &InvertedIndex,
) -> Result<(TermDistribution, SrmTrace)> {
    params.validate()?;
    let q_n = &session.current.analyzed;
    if q_n.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let mut model = TermDistribution::zero();
    let mut trace = SrmTrace {
        session_id: session.session_id.clone(),
        steps: Vec::with_capacity(session.n()),
    };
    let mut previous: Option<&AnalyzedText> = None;

    for t in 1..=session.n() {
        let q_t = &session.query(t).analyzed;
        if q_t.is_empty() {
            trace.steps.push(StepTrace {
                t,
                query: session.query(t).raw.clone(),
                skipped: true,
                change: QueryChange::default(),
                feedback: FeedbackSet::empty(),
                gamma_t: 0.0,
                lambda_t: 0.0,
                kl: None,
                top_terms: Vec::new(),
            });
            previous = Some(q_t);
            continue;
        }
        let change = classify_change(previous, q_t)?;
        let feedback = select_feedback_docs(session, t, params.m, params.mu, index)?;

        let (anchored, lambda_t) = if feedback.is_empty() {
            (TermDistribution::mle(q_t), 0.0)
        } else {
            let fm = match params.variant {
                Variant::Qc => feedback_model(&change, &feedback, &params.change_priors, index, params.mu)?,
                Variant::Rm1 => rm1_model(q_n, &feedback.doc_ids, index, params.mu)?,
            };
            let w = anchor_weight(q_t, q_n, params.lambda, index)?;
            (interpolate_with_query(&fm, q_t, w), w)
        };

        let (gamma_t, kl) = self_clarity_gamma(&anchored, &model, params.gamma);
        model = srm_update(&model, &anchored, gamma_t);

        trace.steps.push(StepTrace {
            t,
            query: session.query(t).raw.clone(),
            skipped: false,
            change,
            feedback,
            gamma_t,
            lambda_t,
            kl: kl.is_finite().then_some(kl),
            top_terms: anchored.top_terms(TRACE_TERMS),
        });
        previous = Some(q_t);
    }
    Ok((model.clip(params.clip_terms), trace))
}

/// Re-ranks initial query-likelihood candidates by adding the model's
/// cross-entropy score. A zero model is replaced by the current query's MLE.
pub fn rerank(
    candidates: &RankedList,
    model: &TermDistribution,
    q_n: &AnalyzedText,
    index: &InvertedIndex,
    mu: f64,
) -> Result<RankedList> {
    let fallback;
    let model = if model.is_zero() {
        fallback = TermDistribution::mle(q_n);
        &fallback
    } else {
        model
    };
    rerank_by(candidates, index, |d| cross_entropy_score(model, d, index.stats(), mu))
}

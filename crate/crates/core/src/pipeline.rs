//! Per-session ranking: initial retrieval for the current query followed by
//! a method-specific re-rank.

use alloc::format;
use alloc::string::String;

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzedText;
use crate::baselines::{qa_score, retrieve_feedback, rm3_model, Aggregation, DEFAULT_DECAY};
use crate::index::InvertedIndex;
use crate::lm::{TermDistribution, DEFAULT_MU};
use crate::retrieval::{rerank_by, retrieve, RankedList};
use crate::session::Session;
use crate::srm::{build_session_model, rerank, ChangePriors, SrmParams, SrmTrace, Variant};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Initial query-likelihood retrieval only.
    None,
    SrmQc,
    SrmRm1,
    Rm3Qn,
    Rm3Qprime,
    QaUniform,
    QaDecay,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::None,
        Method::SrmQc,
        Method::SrmRm1,
        Method::Rm3Qn,
        Method::Rm3Qprime,
        Method::QaUniform,
        Method::QaDecay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::SrmQc => "srm-qc",
            Method::SrmRm1 => "srm-rm1",
            Method::Rm3Qn => "rm3-qn",
            Method::Rm3Qprime => "rm3-qprime",
            Method::QaUniform => "qa-uniform",
            Method::QaDecay => "qa-decay",
        }
    }

    /// Whether the method reads `gamma`.
    pub fn uses_gamma(self) -> bool {
        matches!(self, Method::SrmQc | Method::SrmRm1)
    }

    /// Whether the method reads `lambda` and `m`.
    pub fn uses_feedback(self) -> bool {
        matches!(self, Method::SrmQc | Method::SrmRm1 | Method::Rm3Qn | Method::Rm3Qprime)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown method `{s}`")))
    }
}

/// Every tunable value any method may read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodParams {
    pub lambda: f64,
    pub gamma: f64,
    pub m: usize,
    pub mu: f64,
    pub clip_terms: usize,
    pub decay: f64,
    pub change_priors: ChangePriors,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            gamma: 0.5,
            m: 10,
            mu: DEFAULT_MU,
            clip_terms: 100,
            decay: DEFAULT_DECAY,
            change_priors: ChangePriors::default(),
        }
    }
}

impl MethodParams {
    pub fn srm(&self, variant: Variant) -> SrmParams {
        SrmParams {
            gamma: self.gamma,
            lambda: self.lambda,
            m: self.m,
            mu: self.mu,
            change_priors: self.change_priors,
            clip_terms: self.clip_terms,
            variant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.srm(Variant::Qc).validate()?;
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidParam(format!("decay must lie in (0, 1], got {}", self.decay)));
        }
        Ok(())
    }
}

/// Ranking plus the expansion model and trace when the method builds one.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRun {
    pub ranking: RankedList,
    pub model: Option<TermDistribution>,
    pub trace: Option<SrmTrace>,
}

/// Initial top-`depth` retrieval for the session's current query.
pub fn initial_candidates(session: &Session, index: &InvertedIndex, mu: f64, depth: usize) -> RankedList {
    retrieve(&session.current.analyzed, index, mu, depth)
}

/// Re-ranks precomputed initial candidates with `method`.
pub fn rerank_session(
    session: &Session,
    method: Method,
    params: &MethodParams,
    index: &InvertedIndex,
    candidates: &RankedList,
) -> Result<SessionRun> {
    let q_n = &session.current.analyzed;
    if q_n.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let stats = index.stats();
    let mu = params.mu;
    let with_model = |model: TermDistribution, trace: Option<SrmTrace>| -> Result<SessionRun> {
        Ok(SessionRun {
            ranking: rerank(candidates, &model, q_n, index, mu)?,
            model: Some(model),
            trace,
        })
    };
    match method {
        Method::None => Ok(SessionRun {
            ranking: candidates.clone(),
            model: None,
            trace: None,
        }),
        Method::SrmQc | Method::SrmRm1 => {
            let variant = if method == Method::SrmQc { Variant::Qc } else { Variant::Rm1 };
            let (model, trace) = build_session_model(session, &params.srm(variant), index)?;
            with_model(model, Some(trace))
        }
        Method::Rm3Qn | Method::Rm3Qprime => {
            let query = if method == Method::Rm3Qn {
                q_n.clone()
            } else {
                AnalyzedText::concat(session.queries().map(|q| &q.analyzed))
            };
            let feedback = if method == Method::Rm3Qn {
                candidates.doc_ids().take(params.m).map(String::from).collect()
            } else {
                retrieve_feedback(&query, index, mu, params.m)
            };
            let model = if feedback.is_empty() {
                TermDistribution::mle(&query)
            } else {
                rm3_model(&query, &feedback, index, mu, params.lambda, params.clip_terms)?
            };
            with_model(model, None)
        }
        Method::QaUniform | Method::QaDecay => {
            let agg = if method == Method::QaUniform {
                Aggregation::Uniform
            } else {
                Aggregation::Decay(params.decay)
            };
            Ok(SessionRun {
                ranking: rerank_by(candidates, index, |d| qa_score(session, d, stats, mu, agg))?,
                model: None,
                trace: None,
            })
        }
    }
}

/// Retrieval plus re-rank for one session.
pub fn run_session(session: &Session, method: Method, params: &MethodParams, index: &InvertedIndex, depth: usize) -> Result<SessionRun> {
    let candidates = initial_candidates(session, index, params.mu, depth);
    rerank_session(session, method, params, index, &candidates)
}

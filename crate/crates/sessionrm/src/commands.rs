//! Batch commands behind the CLI subcommands.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sessionrm_core::eval::{EvalSettings, Judgments, Metrics, MetricsReport, Qrels, SessionMetrics};
use sessionrm_core::pipeline::{initial_candidates, rerank_session, SessionRun};
use sessionrm_core::session::Session;
use sessionrm_core::srm::SrmTrace;
use sessionrm_core::{build_index, InvertedIndex, RankedList, TermDistribution};

use crate::config::RunConfig;
use crate::formats::corpus::read_corpus;
use crate::formats::qrels::read_qrels;
use crate::formats::run::{format_run, read_run, RunFile};
use crate::formats::sessions::read_sessions;
use crate::formats::snapshot::{read_index, write_index};
use crate::formats::write_bytes;
use crate::tune::{grid_tune, TrainSet, TuneResult};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub documents: usize,
    pub terms: usize,
    pub tokens: u64,
}

pub fn cmd_index(corpus: &Path, out: &Path) -> Result<IndexSummary> {
    let records = read_corpus(corpus)?;
    if records.is_empty() {
        warn!("{}: corpus is empty, writing an empty index", corpus.display());
    }
    let index = build_index(records.iter().map(|r| (r.id.as_str(), r.text.as_str())))?;
    write_index(&index, out)?;
    Ok(IndexSummary {
        documents: index.num_docs(),
        terms: index.num_terms(),
        tokens: index.stats().total_tokens,
    })
}

pub fn eval_settings(k: usize, depth: usize, qrels: &Qrels) -> EvalSettings {
    EvalSettings {
        k,
        depth,
        g_max: qrels.max_grade(),
    }
}

fn judgments<'q>(qrels: &'q Qrels, topic: &str) -> &'q Judgments {
    static EMPTY: Judgments = Judgments::new();
    qrels.topics.get(topic).unwrap_or(&EMPTY)
}

/// Metrics for one ranking. A topic missing from the qrels scores zero.
pub fn judge(session: &Session, ranking: &RankedList, qrels: &Qrels, settings: &EvalSettings) -> SessionMetrics {
    score_topic(&session.session_id, &session.topic_id, ranking, qrels, settings)
}

fn score_topic(session_id: &str, topic: &str, ranking: &RankedList, qrels: &Qrels, settings: &EvalSettings) -> SessionMetrics {
    SessionMetrics {
        session_id: session_id.into(),
        topic_id: topic.into(),
        metrics: Metrics::compute(ranking, judgments(qrels, topic), settings),
    }
}

fn warn_unjudged<'a>(topics: impl Iterator<Item = &'a str>, qrels: &Qrels) {
    let mut missing: Vec<&str> = topics.filter(|t| !qrels.topics.contains_key(*t)).collect();
    missing.sort_unstable();
    missing.dedup();
    if !missing.is_empty() {
        warn!("no judgments for topic(s) {}; they score zero", missing.join(", "));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub metrics: MetricsReport,
    /// Sessions whose current query is empty after analysis.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionModel {
    pub session_id: String,
    pub model: TermDistribution,
}

/// Everything a run produces, before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub run_text: String,
    pub report: RunReport,
    pub models: Vec<SessionModel>,
    pub traces: Vec<SrmTrace>,
}

/// Runs the configured method over every session in parallel; output
/// follows the session file order.
pub fn run_sessions(cfg: &RunConfig, index: &InvertedIndex, sessions: &[Session], qrels: &Qrels) -> Result<RunOutput> {
    let results: Vec<Option<SessionRun>> = sessions
        .par_iter()
        .map(|s| {
            if s.current.analyzed.is_empty() {
                return Ok(None);
            }
            let candidates = initial_candidates(s, index, cfg.params.mu, cfg.depth);
            rerank_session(s, cfg.method, &cfg.params, index, &candidates).map(Some)
        })
        .collect::<sessionrm_core::Result<_>>()?;

    let settings = eval_settings(cfg.k, cfg.depth, qrels);
    let mut skipped = Vec::new();
    let mut judged = Vec::new();
    let mut ranked = Vec::new();
    let mut models = Vec::new();
    let mut traces = Vec::new();
    for (s, run) in sessions.iter().zip(results) {
        let Some(run) = run else {
            warn!("session {}: current query is empty after analysis, skipped", s.session_id);
            skipped.push(s.session_id.clone());
            continue;
        };
        judged.push(judge(s, &run.ranking, qrels, &settings));
        if let Some(model) = run.model {
            models.push(SessionModel {
                session_id: s.session_id.clone(),
                model,
            });
        }
        traces.extend(run.trace);
        ranked.push((s.session_id.as_str(), run.ranking));
    }
    warn_unjudged(judged.iter().map(|j| j.topic_id.as_str()), qrels);
    let run_text = format_run(ranked.iter().map(|(id, r)| (*id, r)), &cfg.run_tag);
    Ok(RunOutput {
        run_text,
        report: RunReport {
            config: cfg.clone(),
            metrics: MetricsReport::new(settings, judged),
            skipped,
        },
        models,
        traces,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Where `cmd_run` writes its artifacts; the report goes to stdout when unset.
#[derive(Debug, Clone, Default)]
pub struct RunOutputs {
    pub run: PathBuf,
    pub report: Option<PathBuf>,
    pub dump_model: Option<PathBuf>,
    pub dump_trace: Option<PathBuf>,
}

pub fn cmd_run(cfg: &RunConfig, out: &RunOutputs) -> Result<RunReport> {
    let index = read_index(cfg.require(&cfg.index, "index")?)?;
    let sessions = read_sessions(cfg.require(&cfg.sessions, "sessions")?)?;
    let qrels = read_qrels(cfg.require(&cfg.qrels, "qrels")?)?;
    info!("{} sessions, method {}", sessions.len(), cfg.method);
    let output = run_sessions(cfg, &index, &sessions, &qrels)?;
    write_bytes(&out.run, output.run_text.as_bytes())?;
    let report_json = to_json(&output.report);
    match &out.report {
        Some(p) => write_bytes(p, report_json.as_bytes())?,
        None => print!("{report_json}"),
    }
    if let Some(p) = &out.dump_model {
        write_bytes(p, to_json(&output.models).as_bytes())?;
    }
    if let Some(p) = &out.dump_trace {
        write_bytes(p, to_json(&output.traces).as_bytes())?;
    }
    Ok(output.report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub run: PathBuf,
    pub qrels: PathBuf,
    pub sessions: Option<PathBuf>,
    pub k: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub metrics: MetricsReport,
    pub skipped: Vec<String>,
}

/// Scores a parsed run. With sessions, query ids are session ids mapped to
/// their topics, sessions are visited in file order, and a session absent
/// from the run counts as an empty ranking unless its current query is
/// empty (then it is skipped, as `run` does). Without sessions, query ids
/// are topic ids.
pub fn evaluate_run(
    run: &RunFile,
    sessions: Option<&[Session]>,
    qrels: &Qrels,
    k: usize,
    depth: usize,
) -> (MetricsReport, Vec<String>) {
    let settings = eval_settings(k, depth, qrels);
    let empty = RankedList::default();
    let mut skipped = Vec::new();
    let judged: Vec<SessionMetrics> = match sessions {
        Some(sessions) => sessions
            .iter()
            .filter_map(|s| match run.rankings.get(&s.session_id) {
                Some(r) => Some(judge(s, r, qrels, &settings)),
                None if s.current.analyzed.is_empty() => {
                    skipped.push(s.session_id.clone());
                    None
                }
                None => Some(judge(s, &empty, qrels, &settings)),
            })
            .collect(),
        None => run
            .order
            .iter()
            .map(|q| score_topic(q, q, &run.rankings[q], qrels, &settings))
            .collect(),
    };
    warn_unjudged(judged.iter().map(|j| j.topic_id.as_str()), qrels);
    (MetricsReport::new(settings, judged), skipped)
}

pub fn cmd_eval(config: EvalConfig) -> Result<EvalReport> {
    let run = read_run(&config.run)?;
    let qrels = read_qrels(&config.qrels)?;
    let sessions = config.sessions.as_deref().map(read_sessions).transpose()?;
    let (metrics, skipped) = evaluate_run(&run, sessions.as_deref(), &qrels, config.k, config.depth);
    Ok(EvalReport {
        config,
        metrics,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub config: RunConfig,
    #[serde(flatten)]
    pub result: TuneResult,
}

pub fn cmd_tune(cfg: &RunConfig) -> Result<TuneReport> {
    let index = read_index(cfg.require(&cfg.index, "index")?)?;
    let sessions = read_sessions(cfg.require(&cfg.sessions, "sessions")?)?;
    let qrels = read_qrels(cfg.require(&cfg.qrels, "qrels")?)?;
    let train = TrainSet::new(&sessions, &index, cfg.params.mu, cfg.depth)?;
    let settings = eval_settings(cfg.k, cfg.depth, &qrels);
    let result = grid_tune(&train, cfg.method, &cfg.params, &cfg.grid, &index, &qrels, &settings)?;
    info!(
        "best MAP {:.4} at lambda={} gamma={} m={} ({} grid points)",
        result.metrics.map,
        result.best.lambda,
        result.best.gamma,
        result.best.m,
        result.table.len()
    );
    Ok(TuneReport {
        config: cfg.clone(),
        result,
    })
}

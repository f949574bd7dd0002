//! Exhaustive grid search maximizing mean average precision.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sessionrm_core::eval::{EvalSettings, Metrics, Qrels};
use sessionrm_core::pipeline::{initial_candidates, rerank_session, Method, MethodParams};
use sessionrm_core::session::Session;
use sessionrm_core::{InvertedIndex, RankedList};

use crate::commands::judge;
use crate::config::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub lambda: f64,
    pub gamma: f64,
    pub m: usize,
}

impl GridPoint {
    pub fn apply(&self, base: &MethodParams) -> MethodParams {
        MethodParams {
            lambda: self.lambda,
            gamma: self.gamma,
            m: self.m,
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    #[serde(flatten)]
    pub point: GridPoint,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub method: Method,
    pub best: GridPoint,
    pub params: MethodParams,
    pub metrics: Metrics,
    pub table: Vec<GridScore>,
}

/// Grid points the method actually distinguishes. Axes the method ignores
/// collapse to the base value.
pub fn grid_points(method: Method, base: &MethodParams, grid: &Grid) -> Result<Vec<GridPoint>> {
    let lambdas = if method.uses_feedback() { grid.lambda.clone() } else { vec![base.lambda] };
    let gammas = if method.uses_gamma() { grid.gamma.clone() } else { vec![base.gamma] };
    let ms = if method.uses_feedback() { grid.m.clone() } else { vec![base.m] };
    if lambdas.is_empty() || gammas.is_empty() || ms.is_empty() {
        return Err(sessionrm_core::Error::EmptyGrid.into());
    }
    let mut points = Vec::with_capacity(lambdas.len() * gammas.len() * ms.len());
    for &m in &ms {
        for &lambda in &lambdas {
            for &gamma in &gammas {
                points.push(GridPoint { lambda, gamma, m });
            }
        }
    }
    Ok(points)
}

/// Training sessions with their initial candidate lists, computed once.
pub struct TrainSet<'a> {
    sessions: Vec<(&'a Session, RankedList)>,
}

impl<'a> TrainSet<'a> {
    /// Sessions whose current query analyzes to nothing are dropped.
    pub fn new(sessions: &'a [Session], index: &InvertedIndex, mu: f64, depth: usize) -> Result<Self> {
        let sessions: Vec<_> = sessions
            .par_iter()
            .filter(|s| !s.current.analyzed.is_empty())
            .map(|s| (s, initial_candidates(s, index, mu, depth)))
            .collect();
        if sessions.is_empty() {
            return Err(Error::Config("no training sessions with a non-empty current query".into()));
        }
        Ok(Self { sessions })
    }

    /// Mean metrics of one parameter setting, sessions evaluated in order.
    pub fn evaluate(
        &self,
        method: Method,
        params: &MethodParams,
        index: &InvertedIndex,
        qrels: &Qrels,
        settings: &EvalSettings,
    ) -> Result<Metrics> {
        let mut all = Vec::with_capacity(self.sessions.len());
        for (s, candidates) in &self.sessions {
            let run = rerank_session(s, method, params, index, candidates)?;
            all.push(judge(s, &run.ranking, qrels, settings).metrics);
        }
        Ok(Metrics::mean(&all))
    }
}

fn better(a: &GridScore, b: &GridScore) -> bool {
    let (pa, pb) = (&a.point, &b.point);
    match a.metrics.map.total_cmp(&b.metrics.map) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            (pa.m, pa.lambda, pa.gamma).partial_cmp(&(pb.m, pb.lambda, pb.gamma)) == Some(std::cmp::Ordering::Less)
        }
    }
}

/// Evaluates every grid point (in parallel) and returns the one with the
/// highest mean MAP. Ties go to smaller m, then smaller lambda, then smaller
/// gamma.
pub fn grid_tune(
    train: &TrainSet<'_>,
    method: Method,
    base: &MethodParams,
    grid: &Grid,
    index: &InvertedIndex,
    qrels: &Qrels,
    settings: &EvalSettings,
) -> Result<TuneResult> {
    let points = grid_points(method, base, grid)?;
    let table = points
        .par_iter()
        .map(|p| {
            let metrics = train.evaluate(method, &p.apply(base), index, qrels, settings)?;
            Ok(GridScore { point: *p, metrics })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = &table[0];
    for s in &table[1..] {
        if better(s, best) {
            best = s;
        }
    }
    Ok(TuneResult {
        method,
        best: best.point,
        params: best.point.apply(base),
        metrics: best.metrics,
        table,
    })
}

//! TREC run files: `query_id Q0 doc_id rank score run_tag`, rank from 1.
//!
//! The query id column carries the session id, since several sessions may
//! share a topic.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sessionrm_core::{RankedList, ScoredDoc};

use super::read_to_string;
use crate::{Error, Result};

pub fn format_run<'a, I>(runs: I, tag: &str) -> String
where
    I: IntoIterator<Item = (&'a str, &'a RankedList)>,
{
    let mut out = String::new();
    for (qid, ranking) in runs {
        for (i, e) in ranking.entries().iter().enumerate() {
            writeln!(out, "{qid} Q0 {} {} {:.6} {tag}", e.doc_id, i + 1, e.score).unwrap();
        }
    }
    out
}

/// Parsed run: query ids in order of first appearance, each ranking ordered
/// by the rank column.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunFile {
    pub order: Vec<String>,
    pub rankings: BTreeMap<String, RankedList>,
}

pub fn parse_run(text: &str, path: &Path) -> Result<RunFile> {
    let mut order = Vec::new();
    let mut rows: BTreeMap<String, Vec<(u64, ScoredDoc)>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [qid, _q0, doc, rank, score, _tag] = fields[..] else {
            return Err(Error::parse(path, i + 1, format!("expected 6 columns, found {}", fields.len())));
        };
        let rank: u64 = rank
            .parse()
            .ok()
            .filter(|r| *r >= 1)
            .ok_or_else(|| Error::parse(path, i + 1, format!("bad rank `{rank}`")))?;
        let score: f64 = score
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("bad score `{score}`")))?;
        if !rows.contains_key(qid) {
            order.push(qid.to_string());
        }
        rows.entry(qid.to_string()).or_default().push((
            rank,
            ScoredDoc {
                doc_id: doc.to_string(),
                score,
            },
        ));
    }
    let rankings = rows
        .into_iter()
        .map(|(qid, mut v)| {
            v.sort_by_key(|(r, _)| *r);
            (qid, RankedList::from_ordered(v.into_iter().map(|(_, d)| d).collect()))
        })
        .collect();
    Ok(RunFile { order, rankings })
}

pub fn read_run(path: &Path) -> Result<RunFile> {
    parse_run(&read_to_string(path)?, path)
}

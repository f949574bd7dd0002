//! TREC qrels: `topic_id iteration doc_id grade` per line.

use std::path::Path;

use sessionrm_core::eval::Qrels;

use super::read_to_string;
use crate::{Error, Result};

/// Negative grades (used by some tracks for spam) are clamped to zero.
pub fn parse_qrels(text: &str, path: &Path) -> Result<Qrels> {
    let mut qrels = Qrels::default();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [topic, _iter, doc, grade] = fields[..] else {
            return Err(Error::parse(path, i + 1, format!("expected 4 columns, found {}", fields.len())));
        };
        let grade: i64 = grade
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("grade `{grade}` is not an integer")))?;
        qrels.insert(topic, doc, grade.clamp(0, u32::MAX as i64) as u32);
    }
    Ok(qrels)
}

pub fn read_qrels(path: &Path) -> Result<Qrels> {
    parse_qrels(&read_to_string(path)?, path)
}

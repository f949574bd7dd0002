//! Corpus input: one JSON object `{"id": ..., "text": ...}` per line.

use std::path::Path;

use serde::Deserialize;

use super::read_to_string;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
}

/// Parses JSON-lines text. Blank lines are skipped; `path` is only used in
/// error messages.
pub fn parse_corpus(text: &str, path: &Path) -> Result<Vec<CorpusRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusRecord = serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_corpus(path: &Path) -> Result<Vec<CorpusRecord>> {
    parse_corpus(&read_to_string(path)?, path)
}

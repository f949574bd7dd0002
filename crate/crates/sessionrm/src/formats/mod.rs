//! On-disk formats: JSON-lines corpus, JSON sessions, index snapshots, TREC
//! qrels and run files.

pub mod corpus;
pub mod qrels;
pub mod run;
pub mod sessions;
pub mod snapshot;

use std::fs;
use std::path::Path;

use crate::{Error, Result};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

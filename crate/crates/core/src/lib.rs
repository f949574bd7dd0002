//! Session relevance modelling over a language-model retrieval core.
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`): text
//! analysis, the in-memory inverted index, Dirichlet language models, the
//! session relevance model built from query changes, the comparison
//! baselines, and graded ranking metrics. File formats, the command line and
//! parallel tuning live in the `sessionrm` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod baselines;
mod error;
pub mod eval;
pub mod index;
pub mod lm;
pub mod pipeline;
pub mod retrieval;
pub mod session;
pub mod srm;
pub mod stem;

pub use analysis::{analyze, AnalyzedText};
pub use error::Error;
pub use index::{build_index, CollectionStats, DocumentRecord, InvertedIndex};
pub use lm::{SmoothingConfig, TermDistribution};
pub use retrieval::{RankedList, ScoredDoc};

pub type Result<T, E = Error> = core::result::Result<T, E>;

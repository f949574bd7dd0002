//! File formats, configuration, grid tuning and batch commands around
//! [`sessionrm_core`].

pub mod commands;
pub mod config;
mod error;
pub mod formats;
pub mod tune;

pub use error::{Error, Result};

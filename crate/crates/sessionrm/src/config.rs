//! Run configuration. Values come from CLI flags, then an optional JSON
//! config file, then built-in defaults, in that order of precedence.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sessionrm_core::pipeline::{Method, MethodParams};
use sessionrm_core::srm::ChangePriors;

use crate::formats::read_to_string;
use crate::{Error, Result};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_DEPTH: usize = 2000;
pub const DEFAULT_RUN_TAG: &str = "sessionrm";

/// Grid values to search. Missing axes fall back to the default grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialGrid {
    pub lambda: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub m: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    pub m: Vec<usize>,
}

impl Default for Grid {
    /// lambda, gamma in {0.1, ..., 0.9}; m in {5, 10, ..., 100}.
    fn default() -> Self {
        let tenths: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        Self {
            lambda: tenths.clone(),
            gamma: tenths,
            m: (1..=20).map(|i| i * 5).collect(),
        }
    }
}

/// Every setting optional; used for both the config file and CLI overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub index: Option<PathBuf>,
    pub sessions: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub method: Option<Method>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub m: Option<usize>,
    pub mu: Option<f64>,
    pub clip: Option<usize>,
    pub decay: Option<f64>,
    pub change_priors: Option<ChangePriors>,
    pub k: Option<usize>,
    pub depth: Option<usize>,
    pub run_tag: Option<String>,
    pub grid: Option<PartialGrid>,
}

macro_rules! prefer {
    ($hi:expr, $lo:expr, $grid:expr, $($f:ident),*) => {
        PartialConfig { grid: $grid, $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl PartialConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&read_to_string(path)?, path)
    }

    /// Field-wise merge: values set in `self` win over `lower`.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        let grid = match (self.grid, lower.grid) {
            (Some(hi), Some(lo)) => Some(PartialGrid {
                lambda: hi.lambda.or(lo.lambda),
                gamma: hi.gamma.or(lo.gamma),
                m: hi.m.or(lo.m),
            }),
            (hi, lo) => hi.or(lo),
        };
        prefer!(
            self, lower, grid, index, sessions, qrels, method, lambda, gamma, m, mu, clip, decay, change_priors,
            k, depth, run_tag
        )
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let d = MethodParams::default();
        let g = self.grid.unwrap_or_default();
        let dg = Grid::default();
        let cfg = RunConfig {
            index: self.index,
            sessions: self.sessions,
            qrels: self.qrels,
            method: self.method.unwrap_or(Method::None),
            params: MethodParams {
                lambda: self.lambda.unwrap_or(d.lambda),
                gamma: self.gamma.unwrap_or(d.gamma),
                m: self.m.unwrap_or(d.m),
                mu: self.mu.unwrap_or(d.mu),
                clip_terms: self.clip.unwrap_or(d.clip_terms),
                decay: self.decay.unwrap_or(d.decay),
                change_priors: self.change_priors.unwrap_or(d.change_priors),
            },
            k: self.k.unwrap_or(DEFAULT_K),
            depth: self.depth.unwrap_or(DEFAULT_DEPTH),
            run_tag: self.run_tag.unwrap_or_else(|| DEFAULT_RUN_TAG.into()),
            grid: Grid {
                lambda: g.lambda.unwrap_or(dg.lambda),
                gamma: g.gamma.unwrap_or(dg.gamma),
                m: g.m.unwrap_or(dg.m),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fully resolved settings, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub index: Option<PathBuf>,
    pub sessions: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub method: Method,
    pub params: MethodParams,
    pub k: usize,
    pub depth: usize,
    pub run_tag: String,
    pub grid: Grid,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.k == 0 || self.depth == 0 {
            return Err(Error::Config("k and depth must be >= 1".into()));
        }
        if self.run_tag.is_empty() || self.run_tag.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!("run tag `{}` must be a single non-empty word", self.run_tag)));
        }
        if self.grid.lambda.iter().chain(&self.grid.gamma).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config("grid values for lambda and gamma must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Path that must be set for the command at hand.
    pub fn require<'a>(&self, path: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Config(format!("no {name} path given (flag or config file)")))
    }
}

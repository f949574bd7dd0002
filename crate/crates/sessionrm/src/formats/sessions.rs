//! Session log input:
//!
//! ```json
//! {"sessions": [{"session_id": "1", "topic_id": "7",
//!   "steps": [{"query": "...", "impressions": ["d1", "d2"],
//!              "clicks": [{"doc": "d2", "dwell": 31.5}]}],
//!   "current_query": "..."}]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sessionrm_core::session::{Click, Session, SessionQuery, SessionStep};

use super::read_to_string;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickRecord {
    pub doc: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub query: String,
    #[serde(default)]
    pub impressions: Vec<String>,
    #[serde(default)]
    pub clicks: Vec<ClickRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session_id: String,
    pub topic_id: String,
    #[serde(default)]
    pub steps: Vec<StepRecord>,
    pub current_query: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionFile {
    pub sessions: Vec<SessionRecord>,
}

impl SessionRecord {
    /// Analyzes every query and checks the step invariants.
    pub fn to_session(&self) -> sessionrm_core::Result<Session> {
        let history = self
            .steps
            .iter()
            .map(|s| {
                SessionStep::new(
                    SessionQuery::new(s.query.as_str()),
                    s.impressions.clone(),
                    s.clicks
                        .iter()
                        .map(|c| Click {
                            doc: c.doc.clone(),
                            dwell: c.dwell,
                        })
                        .collect(),
                )
            })
            .collect::<sessionrm_core::Result<Vec<_>>>()?;
        Ok(Session {
            session_id: self.session_id.clone(),
            topic_id: self.topic_id.clone(),
            history,
            current: SessionQuery::new(self.current_query.as_str()),
        })
    }
}

pub fn parse_sessions(text: &str, path: &Path) -> Result<Vec<Session>> {
    let file: SessionFile = serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(file.sessions.len());
    for rec in &file.sessions {
        if !seen.insert(rec.session_id.as_str()) {
            return Err(Error::format(path, format!("duplicate session id `{}`", rec.session_id)));
        }
        let s = rec
            .to_session()
            .map_err(|e| Error::format(path, format!("session `{}`: {e}", rec.session_id)))?;
        out.push(s);
    }
    Ok(out)
}

pub fn read_sessions(path: &Path) -> Result<Vec<Session>> {
    parse_sessions(&read_to_string(path)?, path)
}

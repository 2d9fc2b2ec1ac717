//! Replays a recorded event script (JSON lines) against a fresh session.
//!
//! An optional first line `{"version":1,"seed":7,"canvas":{...}}` sets the
//! session config; every other non-blank line is one event.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EventResponse, InputEvent, Session, SessionConfig, SessionError, SessionSnapshot};
use crate::dataset::Dataset;
use crate::geometry::Canvas;

pub const SCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayHeader {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canvas: Option<Canvas>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestions: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Script {
    pub header: Option<ReplayHeader>,
    /// `(1-based line number, event)`.
    pub events: Vec<(usize, InputEvent)>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("line {line}: malformed event: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unsupported script version {version}")]
    Version { line: usize, version: u32 },
    #[error("line {line}: {source}")]
    Session { line: usize, source: SessionError },
}

impl Script {
    pub fn parse(text: &str) -> Result<Script, ReplayError> {
        let mut script = Script::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(raw).map_err(|e| ReplayError::Malformed {
                line,
                message: e.to_string(),
            })?;
            let is_header = script.header.is_none()
                && script.events.is_empty()
                && value.get("kind").is_none()
                && value.get("version").is_some();
            if is_header {
                let header: ReplayHeader = serde_json::from_value(value).map_err(|e| ReplayError::Malformed {
                    line,
                    message: e.to_string(),
                })?;
                if header.version != SCRIPT_VERSION {
                    return Err(ReplayError::Version {
                        line,
                        version: header.version,
                    });
                }
                script.header = Some(header);
                continue;
            }
            let event: InputEvent = serde_json::from_value(value).map_err(|e| ReplayError::Malformed {
                line,
                message: e.to_string(),
            })?;
            script.events.push((line, event));
        }
        Ok(script)
    }

    /// Header values over defaults; `seed` overrides the header seed.
    pub fn config(&self, seed: Option<u64>) -> SessionConfig {
        let mut config = SessionConfig::default();
        if let Some(h) = &self.header {
            config.seed = h.seed.unwrap_or(config.seed);
            config.canvas = h.canvas.unwrap_or(config.canvas);
            config.suggestions = h.suggestions.unwrap_or(config.suggestions);
        }
        if let Some(s) = seed {
            config.seed = s;
        }
        config
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        if let Some(h) = &self.header {
            out.push_str(&serde_json::to_string(h).expect("header serializes"));
            out.push('\n');
        }
        for (_, e) in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ReplayLog {
    pub snapshot: SessionSnapshot,
    pub responses: Vec<EventResponse>,
}

pub fn replay(dataset: Arc<Dataset>, script: &Script, seed: Option<u64>) -> Result<ReplayLog, ReplayError> {
    let mut session = Session::new(dataset, script.config(seed));
    let mut responses = Vec::with_capacity(script.events.len());
    for (line, event) in &script.events {
        let resp = session
            .handle(event)
            .map_err(|source| ReplayError::Session { line: *line, source })?;
        responses.push(resp);
    }
    Ok(ReplayLog {
        snapshot: session.snapshot(),
        responses,
    })
}

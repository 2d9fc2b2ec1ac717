//! Line-delimited JSON over TCP, one session per connection.
//!
//! Client messages: `{"type":"event","event":{..}}` and
//! `{"type":"snapshot_request"}`. The server greets with the dataset schema
//! and answers each event with a state diff followed by any feedback, menu
//! and tooltip messages. Protocol violations get a coded error and the
//! connection is closed.

use std::collections::BTreeSet;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use serde::{Deserialize, Serialize};

use super::{EventResponse, FeedbackMessage, InputEvent, Session, SessionConfig, SessionSnapshot, Tooltip};
use crate::dataset::Dataset;
use crate::fusion::MenuRequest;
use crate::nl::Grammar;
use crate::view_state::{Annotation, GlobalBindings, LocalBinding, PointVisual, ViewState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Event { event: InputEvent },
    SnapshotRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadMessage,
    OutOfOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ServerMessage {
    Schema { schema: serde_json::Value },
    Diff { seq: u64, diff: StateDiff, listening: bool },
    Feedback { seq: u64, feedback: FeedbackMessage },
    Menu { seq: u64, menu: MenuRequest },
    Tooltip { seq: u64, tooltip: Tooltip },
    Snapshot { snapshot: SessionSnapshot },
    Error { code: ErrorCode, message: String },
}

/// Changed parts of the view; unchanged sections are omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StateDiff {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointVisual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<GlobalBindings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locals: Option<Vec<LocalBinding>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Vec<Annotation>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin: Option<BTreeSet<u32>>,
}

impl StateDiff {
    pub fn between(before: &ViewState, after: &ViewState) -> StateDiff {
        StateDiff {
            points: after
                .points
                .iter()
                .zip(&before.points)
                .filter(|(a, b)| a != b)
                .map(|(a, _)| a.clone())
                .collect(),
            global: (before.global != after.global).then(|| after.global.clone()),
            locals: (before.locals != after.locals).then(|| after.locals.clone()),
            annotations: (before.annotations != after.annotations).then(|| after.annotations.clone()),
            selection: (before.selection != after.selection).then(|| after.selection.clone()),
            bin: (before.bin != after.bin).then(|| after.bin.clone()),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == StateDiff::default()
    }

    /// Applies the diff to a client-side copy of the state.
    pub fn apply_to(&self, state: &mut ViewState) {
        for p in &self.points {
            state.points[p.row_id as usize] = p.clone();
        }
        if let Some(g) = &self.global {
            state.global = g.clone();
        }
        if let Some(l) = &self.locals {
            state.locals = l.clone();
        }
        if let Some(a) = &self.annotations {
            state.annotations = a.clone();
        }
        if let Some(s) = &self.selection {
            state.selection = s.clone();
        }
        if let Some(b) = &self.bin {
            state.bin = b.clone();
        }
    }
}

fn response_messages(diff: StateDiff, resp: EventResponse) -> Vec<ServerMessage> {
    let seq = resp.seq;
    let mut out = vec![ServerMessage::Diff {
        seq,
        diff,
        listening: resp.listening,
    }];
    out.extend(
        resp.feedback
            .into_iter()
            .map(|feedback| ServerMessage::Feedback { seq, feedback }),
    );
    if let Some(menu) = resp.menu {
        out.push(ServerMessage::Menu { seq, menu });
    }
    if let Some(tooltip) = resp.tooltip {
        out.push(ServerMessage::Tooltip { seq, tooltip });
    }
    out
}

#[allow(clippy::result_large_err)]
/// Processes one client line. `Err` carries the closing error message.
pub fn handle_line(session: &mut Session, line: &str) -> Result<Vec<ServerMessage>, ServerMessage> {
    let msg: ClientMessage = serde_json::from_str(line).map_err(|e| ServerMessage::Error {
        code: ErrorCode::BadMessage,
        message: e.to_string(),
    })?;
    match msg {
        ClientMessage::SnapshotRequest => Ok(vec![ServerMessage::Snapshot {
            snapshot: session.snapshot(),
        }]),
        ClientMessage::Event { event } => {
            let before = session.state().clone();
            let resp = session.handle(&event).map_err(|e| ServerMessage::Error {
                code: ErrorCode::OutOfOrder,
                message: e.to_string(),
            })?;
            let diff = StateDiff::between(&before, session.state());
            Ok(response_messages(diff, resp))
        }
    }
}

fn send(out: &mut impl Write, msg: &ServerMessage) -> io::Result<()> {
    let mut line = serde_json::to_string(msg).map_err(io::Error::other)?;
    line.push('\n');
    out.write_all(line.as_bytes())?;
    out.flush()
}

pub fn handle_connection(
    stream: TcpStream,
    dataset: Arc<Dataset>,
    grammar: Arc<Grammar>,
    config: SessionConfig,
) -> io::Result<()> {
    let peer = stream.peer_addr().ok();
    let mut writer = stream.try_clone()?;
    let reader = BufReader::new(stream);
    let schema = dataset.summary_json();
    let mut session = Session::with_grammar(dataset, grammar, config);
    send(&mut writer, &ServerMessage::Schema { schema })?;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match handle_line(&mut session, &line) {
            Ok(msgs) => {
                for m in &msgs {
                    send(&mut writer, m)?;
                }
            }
            Err(err) => {
                log::warn!("closing session {peer:?}: {err:?}");
                send(&mut writer, &err)?;
                return Ok(());
            }
        }
    }
    Ok(())
}

/// Accepts connections forever, one thread and one session each.
pub fn serve(listener: TcpListener, dataset: Arc<Dataset>, config: SessionConfig) -> io::Result<()> {
    let grammar = Arc::new(Grammar::new(&dataset));
    for stream in listener.incoming() {
        let stream = stream?;
        let (dataset, grammar) = (dataset.clone(), grammar.clone());
        thread::spawn(move || {
            if let Err(e) = handle_connection(stream, dataset, grammar, config) {
                log::warn!("connection ended with error: {e}");
            }
        });
    }
    Ok(())
}

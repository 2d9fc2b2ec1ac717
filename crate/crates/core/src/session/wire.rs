//! Event wire format shared by live connections and replay files: one JSON
//! object per event, `{seq, t_ms, kind, payload, modality}`.

use serde::{Deserialize, Serialize};

use crate::fusion::{GestureEvent, GestureKind, Modality, Scope};
use crate::geometry::Point;
use crate::nl::{OperationKind, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMode {
    Typed,
    #[default]
    Spoken,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    Tap {
        x: f64,
        y: f64,
    },
    DoubleTap {
        x: f64,
        y: f64,
    },
    LongPress {
        x: f64,
        y: f64,
    },
    PointHold {
        x: f64,
        y: f64,
    },
    Drag {
        path: Vec<Point>,
    },
    Lasso {
        path: Vec<Point>,
    },
    Swipe {
        path: Vec<Point>,
    },
    MicTap,
    Utterance {
        text: String,
        #[serde(default)]
        entry_mode: EntryMode,
    },
    /// A context-menu pick.
    Menu {
        operation: OperationKind,
        #[serde(default)]
        params: Params,
        scope: Scope,
    },
    Tool {
        brush: bool,
    },
    Suggestions {
        enabled: bool,
    },
    /// Ambiguity widget click: pick candidate `choice` of ambiguity `ambiguity`.
    ResolveAmbiguity {
        #[serde(default)]
        ambiguity: usize,
        choice: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEvent {
    pub seq: u64,
    pub t_ms: u64,
    #[serde(flatten)]
    pub body: EventBody,
    #[serde(default)]
    pub modality: Modality,
}

impl InputEvent {
    pub fn new(seq: u64, t_ms: u64, body: EventBody) -> InputEvent {
        InputEvent {
            seq,
            t_ms,
            body,
            modality: Modality::Touch,
        }
    }

    pub fn with_modality(mut self, modality: Modality) -> InputEvent {
        self.modality = modality;
        self
    }

    pub fn typed(seq: u64, t_ms: u64, text: &str) -> InputEvent {
        InputEvent::new(
            seq,
            t_ms,
            EventBody::Utterance {
                text: text.to_string(),
                entry_mode: EntryMode::Typed,
            },
        )
    }

    pub fn spoken(seq: u64, t_ms: u64, text: &str) -> InputEvent {
        InputEvent::new(
            seq,
            t_ms,
            EventBody::Utterance {
                text: text.to_string(),
                entry_mode: EntryMode::Spoken,
            },
        )
    }

    /// The pointer primitive carried by this event, if it is one.
    pub fn gesture(&self) -> Option<GestureEvent> {
        let (kind, at, path) = match &self.body {
            EventBody::Tap { x, y } => (GestureKind::Tap, Some(Point::new(*x, *y)), Vec::new()),
            EventBody::DoubleTap { x, y } => (GestureKind::DoubleTap, Some(Point::new(*x, *y)), Vec::new()),
            EventBody::LongPress { x, y } => (GestureKind::LongPress, Some(Point::new(*x, *y)), Vec::new()),
            EventBody::PointHold { x, y } => (GestureKind::PointHold, Some(Point::new(*x, *y)), Vec::new()),
            EventBody::Drag { path } => (GestureKind::Drag, None, path.clone()),
            EventBody::Lasso { path } => (GestureKind::Lasso, None, path.clone()),
            EventBody::Swipe { path } => (GestureKind::Swipe, None, path.clone()),
            EventBody::MicTap => (GestureKind::MicTap, None, Vec::new()),
            _ => return None,
        };
        Some(GestureEvent {
            kind,
            at,
            path,
            modality: self.modality,
            t_ms: self.t_ms,
        })
    }
}

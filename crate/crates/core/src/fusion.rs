//! Pen/touch gesture handling and gesture + speech fusion.
//!
//! Gestures act immediately (selection, tooltips, moves, ink) and may start
//! listening for speech. Parsed utterances are then completed from gesture
//! and system state: a recent swipe supplies an axis direction, a held
//! pointer supplies "here", and a non-empty selection supplies targets.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::geometry::{Direction, Point};
use crate::nl::{Destination, Interpretation, OperationKind, Params, Slot, TargetPolicy};
use crate::view_state::{TargetSpec, ViewState};

pub const SWIPE_MIN_EXTENT: f64 = 80.0;
pub const SWIPE_MAX_ANGLE_DEG: f64 = 20.0;
/// Silence after an implicit trigger before listening stops.
pub const LISTEN_WINDOW_MS: u64 = 5_000;
/// How long an armed swipe or held pointer stays available for fusion.
pub const T_FUSE_MS: u64 = 10_000;
pub const HIT_SLACK: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Pen,
    #[default]
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    Tap,
    DoubleTap,
    LongPress,
    PointHold,
    Drag,
    Lasso,
    Swipe,
    MicTap,
}

/// A classified pointer primitive as sent by the UI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureEvent {
    pub kind: GestureKind,
    #[serde(default)]
    pub at: Option<Point>,
    #[serde(default)]
    pub path: Vec<Point>,
    #[serde(default)]
    pub modality: Modality,
    pub t_ms: u64,
}

/// Modality-free gesture meaning. Only `Ink` depends on the pen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gesture", rename_all = "snake_case")]
pub enum Normalized {
    TapCanvas { at: Point },
    TapPoint { row_id: u32 },
    DoubleTap { at: Point },
    PressCanvas { at: Point },
    PressPoint { row_id: u32, at: Point },
    DragPoint { row_id: u32, to: Point },
    Lasso { polygon: Vec<Point> },
    Swipe { direction: Direction, extent: f64 },
    Ink { points: Vec<Point> },
    MicTap,
    Ignored { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerCause {
    MicTap,
    DoubleTap,
    LongPress,
    Lasso,
    Swipe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmedSwipe {
    pub direction: Direction,
    pub t_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pointer {
    pub at: Point,
    pub t_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriggerState {
    pub listening: bool,
    pub cause: Option<TriggerCause>,
    pub since_ms: u64,
    pub armed: Option<ArmedSwipe>,
    pub pointer: Option<Pointer>,
}

impl TriggerState {
    pub fn start(&mut self, cause: TriggerCause, t_ms: u64) {
        self.listening = true;
        self.cause = Some(cause);
        self.since_ms = t_ms;
    }

    pub fn stop(&mut self) {
        self.listening = false;
        self.cause = None;
    }

    /// The microphone stays on until tapped again; implicit triggers lapse
    /// after the listening window.
    pub fn is_listening(&self, now: u64) -> bool {
        match self.cause {
            _ if !self.listening => false,
            Some(TriggerCause::MicTap) => true,
            _ => now.saturating_sub(self.since_ms) <= LISTEN_WINDOW_MS,
        }
    }

    pub fn armed_swipe(&self, now: u64) -> Option<Direction> {
        self.armed
            .filter(|a| now.saturating_sub(a.t_ms) <= T_FUSE_MS)
            .map(|a| a.direction)
    }

    pub fn pointer(&self, now: u64) -> Option<Point> {
        self.pointer
            .filter(|p| now.saturating_sub(p.t_ms) <= T_FUSE_MS)
            .map(|p| p.at)
    }
}

/// Straight, long, axis-aligned strokes are swipes; anything else is a drag.
pub fn classify_swipe(path: &[Point]) -> Option<(Direction, f64)> {
    let (first, last) = (path.first()?, path.last()?);
    let (dx, dy) = ((last.x - first.x).abs(), (last.y - first.y).abs());
    let extent = dx.hypot(dy);
    if extent < SWIPE_MIN_EXTENT {
        return None;
    }
    let tol = SWIPE_MAX_ANGLE_DEG.to_radians();
    if dy.atan2(dx) <= tol {
        Some((Direction::Horizontal, extent))
    } else if dx.atan2(dy) <= tol {
        Some((Direction::Vertical, extent))
    } else {
        None
    }
}

pub fn normalize(event: &GestureEvent, state: &ViewState, brush: bool) -> Normalized {
    let at = event.at.or_else(|| event.path.first().copied());
    let hit = |p: Point| state.hit_test(p, HIT_SLACK);
    match event.kind {
        GestureKind::MicTap => Normalized::MicTap,
        GestureKind::Tap | GestureKind::DoubleTap | GestureKind::LongPress | GestureKind::PointHold => {
            let Some(at) = at else {
                return Normalized::Ignored {
                    reason: "missing coordinates".into(),
                };
            };
            match (event.kind, hit(at)) {
                (GestureKind::Tap, Some(row_id)) => Normalized::TapPoint { row_id },
                (GestureKind::Tap, None) => Normalized::TapCanvas { at },
                (GestureKind::DoubleTap, _) => Normalized::DoubleTap { at },
                (_, Some(row_id)) => Normalized::PressPoint { row_id, at },
                (_, None) => Normalized::PressCanvas { at },
            }
        }
        GestureKind::Lasso => Normalized::Lasso {
            polygon: event.path.clone(),
        },
        GestureKind::Drag | GestureKind::Swipe => {
            let path = &event.path;
            let (Some(&start), Some(&end)) = (path.first(), path.last()) else {
                return Normalized::Ignored {
                    reason: "empty path".into(),
                };
            };
            if let Some(row_id) = hit(start) {
                return Normalized::DragPoint { row_id, to: end };
            }
            if brush && event.modality == Modality::Pen && path.len() >= 2 {
                return Normalized::Ink { points: path.clone() };
            }
            match classify_swipe(path) {
                Some((direction, extent)) => Normalized::Swipe { direction, extent },
                None => Normalized::Lasso { polygon: path.clone() },
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Global,
    Local,
}

pub const GLOBAL_MENU: [OperationKind; 8] = [
    OperationKind::AssignAxis,
    OperationKind::ColorBy,
    OperationKind::SizeBy,
    OperationKind::Label,
    OperationKind::Summarize,
    OperationKind::Clear,
    OperationKind::Restore,
    OperationKind::Undo,
];

pub const LOCAL_MENU: [OperationKind; 10] = [
    OperationKind::AssignAxis,
    OperationKind::OrderBy,
    OperationKind::ColorBy,
    OperationKind::ColorExplicit,
    OperationKind::SizeExplicit,
    OperationKind::Filter,
    OperationKind::Highlight,
    OperationKind::Label,
    OperationKind::Tag,
    OperationKind::Summarize,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuRequest {
    pub anchor: Point,
    pub scope: Scope,
    pub entries: Vec<OperationKind>,
}

impl MenuRequest {
    pub fn new(anchor: Point, scope: Scope) -> MenuRequest {
        let entries = match scope {
            Scope::Global => GLOBAL_MENU.to_vec(),
            Scope::Local => LOCAL_MENU.to_vec(),
        };
        MenuRequest { anchor, scope, entries }
    }
}

/// Immediate effect of a gesture, applied by the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum DmAction {
    ClearSelection,
    Tooltip { row_id: u32 },
    JoinSelection { row_id: u32 },
    SelectLasso { polygon: Vec<Point> },
    Menu(MenuRequest),
    Move { targets: Vec<u32>, destination: Point },
    Ink { points: Vec<Point> },
}

/// Maps a normalized gesture to direct-manipulation actions and updates the
/// speech trigger. A new gesture replaces any armed swipe.
pub fn on_gesture(g: &Normalized, state: &ViewState, trigger: &mut TriggerState, t_ms: u64) -> Vec<DmAction> {
    match g {
        Normalized::TapCanvas { .. } => vec![DmAction::ClearSelection],
        Normalized::TapPoint { row_id } => vec![DmAction::Tooltip { row_id: *row_id }],
        Normalized::DoubleTap { .. } => {
            trigger.start(TriggerCause::DoubleTap, t_ms);
            Vec::new()
        }
        Normalized::PressCanvas { at } => {
            trigger.armed = None;
            trigger.pointer = Some(Pointer { at: *at, t_ms });
            trigger.start(TriggerCause::LongPress, t_ms);
            vec![DmAction::Menu(MenuRequest::new(*at, Scope::Global))]
        }
        Normalized::PressPoint { row_id, at } => {
            trigger.armed = None;
            trigger.pointer = Some(Pointer { at: *at, t_ms });
            trigger.start(TriggerCause::LongPress, t_ms);
            vec![
                DmAction::JoinSelection { row_id: *row_id },
                DmAction::Menu(MenuRequest::new(*at, Scope::Local)),
            ]
        }
        Normalized::DragPoint { row_id, to } => {
            trigger.armed = None;
            let targets = if state.selection.contains(row_id) {
                let mut s = state.selection.clone();
                s.sort_unstable();
                s
            } else {
                vec![*row_id]
            };
            vec![DmAction::Move {
                targets,
                destination: state.canvas.clamp(*to),
            }]
        }
        Normalized::Lasso { polygon } => {
            trigger.armed = None;
            trigger.start(TriggerCause::Lasso, t_ms);
            vec![DmAction::SelectLasso {
                polygon: polygon.clone(),
            }]
        }
        Normalized::Swipe { direction, .. } => {
            trigger.armed = Some(ArmedSwipe {
                direction: *direction,
                t_ms,
            });
            trigger.start(TriggerCause::Swipe, t_ms);
            Vec::new()
        }
        Normalized::Ink { points } => vec![DmAction::Ink { points: points.clone() }],
        Normalized::MicTap => {
            if trigger.is_listening(t_ms) {
                trigger.stop();
            } else {
                trigger.start(TriggerCause::MicTap, t_ms);
            }
            Vec::new()
        }
        Normalized::Ignored { reason } => {
            log::debug!("gesture ignored: {reason}");
            Vec::new()
        }
    }
}

/// Gesture contribution remembered by the context object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gesture", rename_all = "snake_case")]
pub enum GestureMemo {
    Swipe { direction: Direction },
    Pointer { x: f64, y: f64 },
    Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SpeechOnly,
    DmOnly,
    Multimodal,
}

/// What gesture and system state added to an interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Prefill {
    pub gesture: Option<GestureMemo>,
    pub used_selection: bool,
}

/// Fills fusable slots from gesture and selection state before context
/// resolution.
pub fn prefill(interp: &mut Interpretation, trigger: &TriggerState, now: u64, selection: &[u32]) -> Prefill {
    let mut out = Prefill::default();
    if let Some(direction) = trigger.armed_swipe(now) {
        let bare_attribute = interp.operation.is_none() && !interp.repeat && interp.params.attribute.is_some();
        if bare_attribute {
            interp.operation = Some(OperationKind::AssignAxis);
        }
        if interp.operation == Some(OperationKind::AssignAxis) && interp.params.direction.is_none() {
            interp.params.direction = Some(direction);
            out.gesture = Some(GestureMemo::Swipe { direction });
        }
    }
    if interp.params.destination == Some(Destination::Here) {
        if let Some(p) = trigger.pointer(now) {
            interp.params.destination = Some(Destination::point(p));
            out.gesture = Some(GestureMemo::Pointer { x: p.x, y: p.y });
        }
    }
    let takes_targets = interp.operation.is_none_or(|op| {
        matches!(
            op.requirements().targets,
            TargetPolicy::DefaultAll | TargetPolicy::SelectionRequired
        )
    });
    if takes_targets && !selection.is_empty() {
        match interp.target {
            None => {
                interp.target = Some(TargetSpec::Selection);
                out.used_selection = true;
            }
            Some(TargetSpec::Selection) => out.used_selection = true,
            Some(TargetSpec::Where { ref predicate }) if mentions_selection(predicate) => out.used_selection = true,
            _ => {}
        }
    }
    // a swipe across the bare canvas means the canvas axis, not whatever
    // the previous command targeted
    if matches!(out.gesture, Some(GestureMemo::Swipe { .. })) && interp.target.is_none() {
        interp.target = Some(TargetSpec::AllVisible);
    }
    out
}

fn mentions_selection(p: &crate::view_state::Predicate) -> bool {
    use crate::dataset::VisualFlag;
    use crate::view_state::Predicate;
    match p {
        Predicate::Flag { flag } => *flag == VisualFlag::Selected,
        Predicate::Not { inner } => mentions_selection(inner),
        Predicate::And { all } => all.iter().any(mentions_selection),
        _ => false,
    }
}

/// Where an interpretation came from before fusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Speech,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutableCommand {
    pub operation: OperationKind,
    pub params: Params,
    /// The spec the targets were resolved from; `None` for target-less operations.
    pub target_spec: Option<TargetSpec>,
    pub targets: Vec<u32>,
    pub scope: Scope,
    pub provenance: Provenance,
    pub inferred: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gesture: Option<GestureMemo>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum FuseError {
    /// A slot is still missing; the interpretation is returned for feedback.
    Incomplete {
        interpretation: Interpretation,
        explanation: String,
    },
    /// Targets resolved to nothing.
    NoMatch { description: String },
}

/// Completes defaults, checks slots, and resolves targets.
#[allow(clippy::result_large_err)]
pub fn finalize(
    mut interp: Interpretation,
    inferred: bool,
    fill: &Prefill,
    source: Source,
    state: &ViewState,
    dataset: &Dataset,
) -> Result<ExecutableCommand, FuseError> {
    let incomplete = |interp: Interpretation, explanation: &str| FuseError::Incomplete {
        interpretation: interp,
        explanation: explanation.to_string(),
    };
    let Some(op) = interp.operation else {
        return Err(incomplete(interp, "I could not tell which operation you wanted."));
    };
    if interp.repeat || !interp.missing_mandatory().is_empty() {
        return Err(incomplete(interp, ""));
    }
    if interp.params.destination == Some(Destination::Here) {
        return Err(incomplete(
            interp,
            "I need a location: press and hold on the canvas where the points should go.",
        ));
    }
    let req = op.requirements();
    if req.fusable.contains(&Slot::Direction) && interp.params.direction.is_none() {
        return Err(incomplete(
            interp,
            "Which axis? Swipe across the canvas or say horizontally or vertically.",
        ));
    }
    if req.fusable.contains(&Slot::Destination) && interp.params.destination.is_none() {
        return Err(incomplete(interp, "Where should the points go?"));
    }
    if op == OperationKind::Filter && interp.params.filter_mode.is_none() {
        interp.params.filter_mode = Some(crate::view_state::FilterMode::Remove);
    }
    let spec = match (req.targets, interp.target.take()) {
        (TargetPolicy::NoTargets, _) => None,
        (_, Some(spec)) => Some(spec),
        (TargetPolicy::DefaultAll | TargetPolicy::Bin, None) => Some(TargetSpec::AllVisible),
        (TargetPolicy::SelectionRequired, None) => {
            return Err(incomplete(
                interp,
                "Select some points first, or say which points you mean.",
            ));
        }
    };
    let targets = match &spec {
        None => Vec::new(),
        Some(spec) => {
            let resolved = if req.targets == TargetPolicy::Bin {
                state.resolve_in_bin(spec, dataset)
            } else {
                state.resolve_targets(spec, dataset)
            };
            if let Some(w) = resolved.warning {
                return Err(FuseError::NoMatch { description: w });
            }
            if resolved.ids.is_empty() {
                let description = match (spec, req.targets) {
                    (TargetSpec::Selection, _) => "Nothing is selected.".to_string(),
                    (_, TargetPolicy::Bin) => "No removed points to restore.".to_string(),
                    _ => format!("No points match {}.", spec.describe()),
                };
                return Err(FuseError::NoMatch { description });
            }
            resolved.ids
        }
    };
    let scope = match spec {
        None | Some(TargetSpec::AllVisible) => Scope::Global,
        _ => Scope::Local,
    };
    let provenance = match source {
        Source::Direct => Provenance::DmOnly,
        Source::Speech if fill.gesture.is_some() || fill.used_selection => Provenance::Multimodal,
        Source::Speech => Provenance::SpeechOnly,
    };
    Ok(ExecutableCommand {
        operation: op,
        params: interp.params,
        target_spec: spec,
        targets,
        scope,
        provenance,
        inferred,
        gesture: fill.gesture,
    })
}

//! One interactive session: events in, state changes and feedback out.
//!
//! Utterances go through parse, gesture prefill, context resolution and
//! fusion before execution. Gestures act directly. Every successful command
//! keeps a single undo entry with the state and context it replaced.

pub mod feedback;
pub mod replay;
pub mod server;
pub mod wire;

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{Rgb, DEFAULT_FILL};
use crate::context::{refresh, resolve_followup, ContextObject, Followup};
use crate::dataset::{ClearTarget, Dataset, Referent};
use crate::fusion::{
    finalize, normalize, on_gesture, prefill, DmAction, ExecutableCommand, FuseError, MenuRequest, Prefill, Provenance,
    Scope, Source, TriggerState, T_FUSE_MS,
};
use crate::geometry::{Canvas, Direction, Point};
use crate::layout::{self, ScaleKind, Summary};
use crate::nl::{verb, Ambiguity, Destination, Grammar, Interpretation, OperationKind, ParseOutcome};
use crate::view_state::{
    Annotation, Arrangement, FilterMode, Paint, Radius, Stroke, TargetSpec, ViewState, DEFAULT_RADIUS,
};

pub use feedback::{FeedbackKind, FeedbackMessage};
pub use wire::{EntryMode, EventBody, InputEvent};

pub const SESSION_SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub seed: u64,
    pub canvas: Canvas,
    pub suggestions: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            seed: 0,
            canvas: Canvas::default(),
            suggestions: true,
        }
    }
}

/// Serialized session state: the view plus the conversational context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub version: u32,
    pub state: ViewState,
    pub context: Option<ContextObject>,
}

impl SessionSnapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UndoEntry {
    pub state: ViewState,
    pub context: Option<ContextObject>,
    pub operation: Option<OperationKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tooltip {
    pub row_id: u32,
    pub label: String,
}

/// Everything one event produced besides the state change itself.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventResponse {
    pub seq: u64,
    pub feedback: Vec<FeedbackMessage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub menu: Option<MenuRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tooltip: Option<Tooltip>,
    pub listening: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum SessionError {
    #[error("event seq {seq} does not follow {last}")]
    OutOfOrder { seq: u64, last: u64 },
    #[error("event time {t_ms} ms is earlier than {last} ms")]
    TimeReversed { t_ms: u64, last: u64 },
    #[error("snapshot: {0}")]
    Snapshot(String),
}

/// The last ambiguous command, kept so a widget pick can redo it.
#[derive(Debug, Clone)]
struct PendingAmbiguity {
    interp: Interpretation,
    inferred: bool,
    fill: Prefill,
    source: Source,
}

/// An utterance that lacked a location or direction, waiting for the gesture.
#[derive(Debug, Clone)]
struct PendingFusion {
    interp: Interpretation,
    t_ms: u64,
}

type Outcome = Result<FeedbackMessage, FeedbackMessage>;

pub struct Session {
    dataset: Arc<Dataset>,
    grammar: Arc<Grammar>,
    config: SessionConfig,
    state: ViewState,
    context: Option<ContextObject>,
    trigger: TriggerState,
    undo: Option<UndoEntry>,
    rng: ChaCha8Rng,
    suggestions: bool,
    brush: bool,
    fired_hints: BTreeSet<String>,
    pending_ambiguity: Option<PendingAmbiguity>,
    pending_fusion: Option<PendingFusion>,
    last: Option<(u64, u64)>,
}

impl Session {
    pub fn new(dataset: Arc<Dataset>, config: SessionConfig) -> Session {
        let grammar = Arc::new(Grammar::new(&dataset));
        Session::with_grammar(dataset, grammar, config)
    }

    /// Shares a prebuilt grammar between sessions over the same dataset.
    pub fn with_grammar(dataset: Arc<Dataset>, grammar: Arc<Grammar>, config: SessionConfig) -> Session {
        let state = ViewState::new(&dataset, config.canvas);
        Session {
            dataset,
            grammar,
            config,
            state,
            context: None,
            trigger: TriggerState::default(),
            undo: None,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            suggestions: config.suggestions,
            brush: false,
            fired_hints: BTreeSet::new(),
            pending_ambiguity: None,
            pending_fusion: None,
            last: None,
        }
    }

    /// Resumes from a snapshot; undo history and trigger state start empty.
    pub fn from_snapshot(
        dataset: Arc<Dataset>,
        snapshot: SessionSnapshot,
        config: SessionConfig,
    ) -> Result<Session, SessionError> {
        if snapshot.version != SESSION_SNAPSHOT_VERSION {
            return Err(SessionError::Snapshot(format!(
                "unsupported version {}",
                snapshot.version
            )));
        }
        if snapshot.state.points.len() != dataset.len() {
            return Err(SessionError::Snapshot("row count differs from dataset".into()));
        }
        snapshot.state.check_invariants().map_err(SessionError::Snapshot)?;
        let mut s = Session::new(dataset, config);
        s.state = snapshot.state;
        s.context = snapshot.context;
        Ok(s)
    }

    pub fn state(&self) -> &ViewState {
        &self.state
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn context(&self) -> Option<&ContextObject> {
        self.context.as_ref()
    }

    pub fn trigger(&self) -> &TriggerState {
        &self.trigger
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn can_undo(&self) -> bool {
        self.undo.is_some()
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            version: SESSION_SNAPSHOT_VERSION,
            state: self.state.clone(),
            context: self.context.clone(),
        }
    }

    /// Whether speech would currently be accepted, as of the last event.
    pub fn is_listening(&self) -> bool {
        self.trigger.is_listening(self.last.map_or(0, |l| l.1))
    }

    pub fn handle(&mut self, event: &InputEvent) -> Result<EventResponse, SessionError> {
        if let Some((seq, t)) = self.last {
            if event.seq <= seq {
                return Err(SessionError::OutOfOrder {
                    seq: event.seq,
                    last: seq,
                });
            }
            if event.t_ms < t {
                return Err(SessionError::TimeReversed {
                    t_ms: event.t_ms,
                    last: t,
                });
            }
        }
        self.last = Some((event.seq, event.t_ms));
        let now = event.t_ms;
        let mut resp = EventResponse {
            seq: event.seq,
            ..Default::default()
        };
        match &event.body {
            EventBody::Utterance { text, entry_mode } => {
                resp.feedback.push(self.utterance(text, *entry_mode, now));
            }
            EventBody::Menu {
                operation,
                params,
                scope,
            } => {
                let interp = Interpretation {
                    operation: Some(*operation),
                    params: params.clone(),
                    target: (*scope == Scope::Local).then_some(TargetSpec::Selection),
                    confidence: 1.0,
                    ..Default::default()
                };
                let fill = Prefill::default();
                match finalize(interp, false, &fill, Source::Direct, &self.state, &self.dataset) {
                    Ok(cmd) => resp.feedback.extend(self.commit_with_hint(cmd)),
                    Err(e) => resp.feedback.push(self.fuse_failure(e)),
                }
            }
            EventBody::Tool { brush } => self.brush = *brush,
            EventBody::Suggestions { enabled } => self.suggestions = *enabled,
            EventBody::ResolveAmbiguity { ambiguity, choice } => {
                resp.feedback.push(self.resolve_ambiguity(*ambiguity, *choice));
            }
            _ => {
                let g = event.gesture().expect("remaining kinds are gestures");
                let normalized = normalize(&g, &self.state, self.brush);
                let actions = on_gesture(&normalized, &self.state, &mut self.trigger, now);
                for action in actions {
                    self.dm_action(action, &mut resp);
                }
                if let Some(fb) = self.complete_pending(now) {
                    resp.feedback.push(fb);
                }
            }
        }
        resp.listening = self.trigger.is_listening(now);
        Ok(resp)
    }

    fn dm_action(&mut self, action: DmAction, resp: &mut EventResponse) {
        match action {
            DmAction::ClearSelection => self.state.clear_selection(),
            DmAction::Tooltip { row_id } => {
                resp.tooltip = Some(Tooltip {
                    row_id,
                    label: self.dataset.label_for(row_id),
                })
            }
            DmAction::JoinSelection { row_id } => self.state.add_to_selection(row_id),
            DmAction::SelectLasso { polygon } => {
                self.state.select_by_lasso(&polygon);
            }
            DmAction::Menu(menu) => resp.menu = Some(menu),
            DmAction::Move { targets, destination } => {
                let cmd = ExecutableCommand {
                    operation: OperationKind::Move,
                    params: crate::nl::Params {
                        destination: Some(Destination::point(destination)),
                        ..Default::default()
                    },
                    target_spec: Some(TargetSpec::Ids { ids: targets.clone() }),
                    targets,
                    scope: Scope::Local,
                    provenance: Provenance::DmOnly,
                    inferred: false,
                    gesture: None,
                };
                resp.feedback.extend(self.commit_with_hint(cmd));
            }
            DmAction::Ink { points } => {
                self.push_undo(None);
                self.state.annotations.push(Annotation::InkStroke {
                    points,
                    style: Stroke {
                        width: 2.0,
                        color: Rgb(0x22, 0x22, 0x22),
                    },
                });
                let text = feedback::templates().success.get("ink").cloned().unwrap_or_default();
                resp.feedback.push(FeedbackMessage::new(FeedbackKind::Success, text));
            }
        }
    }

    fn utterance(&mut self, text: &str, mode: EntryMode, now: u64) -> FeedbackMessage {
        if mode == EntryMode::Spoken {
            if !self.trigger.is_listening(now) {
                log::info!("discarded utterance while not listening: {text:?}");
                return feedback::failure("not_listening", &[]);
            }
            if self.trigger.cause != Some(crate::fusion::TriggerCause::MicTap) {
                self.trigger.stop();
            }
        }
        let grammar = self.grammar_with_tags();
        let outcome = grammar.parse(text, &mut self.rng);
        log::debug!("parsed {text:?}: {outcome:?}");
        match outcome {
            ParseOutcome::Unintelligible => feedback::failure("unintelligible", &[("utterance", text.to_string())]),
            ParseOutcome::Complete { interpretation } | ParseOutcome::Partial { interpretation, .. } => {
                match self.run(interpretation, now, true) {
                    Ok(fb) | Err(fb) => fb,
                }
            }
            ParseOutcome::Sequence { steps } => self.run_sequence(steps, now),
        }
    }

    fn grammar_with_tags(&self) -> Arc<Grammar> {
        let tags = self.state.tags();
        if tags.is_empty() {
            self.grammar.clone()
        } else {
            Arc::new(self.grammar.with_tags(tags))
        }
    }

    /// prefill, context, fuse, execute. `push_undo` is false inside a
    /// sequence, which keeps one undo entry for the whole utterance.
    fn run(&mut self, original: Interpretation, now: u64, push_undo: bool) -> Outcome {
        let mut interp = original.clone();
        let fill = prefill(&mut interp, &self.trigger, now, &self.state.selection);
        let ctx = self.live_context();
        let (interp, inferred) = match resolve_followup(interp, ctx.as_ref()) {
            Followup::Complete {
                interpretation,
                inferred,
            } => (interpretation, inferred),
            Followup::Partial { interpretation } => return Err(self.partial(&interpretation, None)),
        };
        let ambiguous = interp.ambiguities.clone();
        let kept = interp.clone();
        match finalize(interp, inferred, &fill, Source::Speech, &self.state, &self.dataset) {
            Ok(cmd) => {
                let mut fb = self.commit(cmd, push_undo)?;
                if !ambiguous.is_empty() {
                    fb.ambiguities = ambiguous;
                    self.pending_ambiguity = Some(PendingAmbiguity {
                        interp: kept,
                        inferred,
                        fill,
                        source: Source::Speech,
                    });
                }
                Ok(fb)
            }
            Err(FuseError::Incomplete {
                interpretation,
                explanation,
            }) => {
                let waits_for_gesture = interpretation.params.destination == Some(Destination::Here)
                    || (interpretation.operation == Some(OperationKind::AssignAxis)
                        && interpretation.params.direction.is_none());
                if waits_for_gesture && push_undo {
                    self.pending_fusion = Some(PendingFusion {
                        interp: original,
                        t_ms: now,
                    });
                }
                Err(self.partial(&interpretation, Some(&explanation)))
            }
            Err(e) => Err(self.fuse_failure(e)),
        }
    }

    /// The context with its targets dropped once none of them is visible
    /// any more, so a follow-up after removing them falls back to defaults.
    fn live_context(&self) -> Option<ContextObject> {
        let mut ctx = self.context.clone()?;
        if let Some(spec) = &ctx.target_spec {
            if self.state.resolve_targets(spec, &self.dataset).ids.is_empty() {
                ctx.target_spec = None;
            }
        }
        Some(ctx)
    }

    fn partial(&mut self, interp: &Interpretation, explanation: Option<&str>) -> FeedbackMessage {
        let explanation = match explanation {
            Some(e) if !e.is_empty() => e.to_string(),
            _ => self.grammar.explain(interp),
        };
        let example = self.grammar.example_command(interp, &mut self.rng);
        feedback::partial(&explanation, example)
    }

    fn fuse_failure(&mut self, e: FuseError) -> FeedbackMessage {
        match e {
            FuseError::Incomplete {
                interpretation,
                explanation,
            } => self.partial(&interpretation, Some(&explanation)),
            FuseError::NoMatch { description } => FeedbackMessage::new(FeedbackKind::Failure, description),
        }
    }

    /// Runs a gesture-completed utterance that was waiting for this gesture.
    fn complete_pending(&mut self, now: u64) -> Option<FeedbackMessage> {
        let pending = self.pending_fusion.take()?;
        if now.saturating_sub(pending.t_ms) > T_FUSE_MS {
            return None;
        }
        let needs_pointer = pending.interp.params.destination == Some(Destination::Here);
        let ready = if needs_pointer {
            self.trigger.pointer(now).is_some()
        } else {
            self.trigger.armed_swipe(now).is_some()
        };
        if !ready {
            self.pending_fusion = Some(pending);
            return None;
        }
        Some(match self.run(pending.interp, now, true) {
            Ok(fb) | Err(fb) => fb,
        })
    }

    fn run_sequence(&mut self, steps: Vec<Interpretation>, now: u64) -> FeedbackMessage {
        if steps.iter().any(|s| s.operation == Some(OperationKind::Undo)) {
            return feedback::failure("sequence_undo", &[]);
        }
        let saved = (self.state.clone(), self.context.clone(), self.undo.clone());
        let mut texts = Vec::new();
        let mut inferred = false;
        for step in steps {
            match self.run(step, now, false) {
                Ok(fb) => {
                    inferred |= fb.kind == FeedbackKind::FollowupInferred;
                    texts.push(fb.text);
                }
                Err(fb) => {
                    (self.state, self.context, self.undo) = saved;
                    return fb;
                }
            }
        }
        self.undo = Some(UndoEntry {
            state: saved.0,
            context: saved.1,
            operation: None,
        });
        let kind = if inferred {
            FeedbackKind::FollowupInferred
        } else {
            FeedbackKind::Success
        };
        FeedbackMessage::new(kind, texts.join(". Then: "))
    }

    fn push_undo(&mut self, operation: Option<OperationKind>) {
        self.undo = Some(UndoEntry {
            state: self.state.clone(),
            context: self.context.clone(),
            operation,
        });
    }

    pub fn undo(&mut self) -> Outcome {
        match self.undo.take() {
            None => Err(feedback::failure("nothing_to_undo", &[])),
            Some(entry) => {
                self.state = entry.state;
                self.context = entry.context;
                self.pending_ambiguity = None;
                let text = feedback::templates().success["undo"].clone();
                Ok(FeedbackMessage::new(FeedbackKind::Success, text))
            }
        }
    }

    /// Applies a fused command atomically. On failure nothing changes.
    pub fn commit(&mut self, cmd: ExecutableCommand, push_undo: bool) -> Outcome {
        if cmd.operation == OperationKind::Undo {
            return self.undo();
        }
        let mut next = self.state.clone();
        let effect = apply(&cmd, &mut next, &self.dataset).map_err(|reason| {
            feedback::failure(
                "execution",
                &[("verb", verb(cmd.operation).to_string()), ("reason", reason)],
            )
        })?;
        if push_undo {
            self.push_undo(Some(cmd.operation));
        }
        self.state = next;
        self.context = Some(refresh(self.context.as_ref(), &cmd));
        self.pending_ambiguity = None;
        self.pending_fusion = None;
        let mut fb = feedback::success(&cmd, effect.count);
        fb.summary = effect.summary;
        Ok(fb)
    }

    /// Direct-manipulation commands, followed by a one-time hint with the
    /// spoken equivalent.
    fn commit_with_hint(&mut self, cmd: ExecutableCommand) -> Vec<FeedbackMessage> {
        let hint = (cmd.provenance == Provenance::DmOnly)
            .then(|| feedback::speech_equivalent(&cmd))
            .flatten();
        match self.commit(cmd, true) {
            Err(fb) => vec![fb],
            Ok(fb) => {
                let mut out = vec![fb];
                if let Some((action, command)) = hint {
                    if self.suggestions && self.fired_hints.insert(command.clone()) {
                        out.push(feedback::hint(&action, &command));
                    }
                }
                out
            }
        }
    }

    /// Re-executes the last ambiguous command with another candidate.
    pub fn resolve_ambiguity(&mut self, index: usize, choice: usize) -> FeedbackMessage {
        let Some(pending) = self.pending_ambiguity.take() else {
            return feedback::failure("no_ambiguity", &[]);
        };
        let Some(amb) = pending.interp.ambiguities.get(index).cloned() else {
            return feedback::failure("no_ambiguity", &[]);
        };
        let Some(picked) = amb.candidates.get(choice).cloned() else {
            return feedback::failure("no_ambiguity", &[]);
        };
        let mut interp = pending.interp.clone();
        substitute_choice(&mut interp, index, &amb, &picked.referent);
        let saved = (self.state.clone(), self.context.clone(), self.undo.clone());
        if self.undo().is_err() {
            return feedback::failure("no_ambiguity", &[]);
        }
        let result = finalize(
            interp.clone(),
            pending.inferred,
            &pending.fill,
            pending.source,
            &self.state,
            &self.dataset,
        )
        .map_err(|e| self.fuse_failure(e))
        .and_then(|cmd| self.commit(cmd, true));
        match result {
            Ok(mut fb) => {
                fb.ambiguities = interp.ambiguities.clone();
                self.pending_ambiguity = Some(PendingAmbiguity { interp, ..pending });
                fb
            }
            Err(fb) => {
                (self.state, self.context, self.undo) = saved;
                self.pending_ambiguity = Some(pending);
                fb
            }
        }
    }
}

/// Swaps the provisional referent for `with` and moves it to the front of
/// the candidate list so the widget shows the current value first.
fn substitute_choice(interp: &mut Interpretation, index: usize, amb: &Ambiguity, with: &Referent) {
    let from = &amb.candidates[0].referent;
    interp.substitute(from, with);
    let cands = &mut interp.ambiguities[index].candidates;
    if let Some(pos) = cands.iter().position(|c| &c.referent == with) {
        let c = cands.remove(pos);
        cands.insert(0, c);
    }
}

#[derive(Debug, Default)]
struct Effect {
    count: usize,
    summary: Option<Summary>,
}

fn attribute(cmd: &ExecutableCommand) -> Result<&str, String> {
    cmd.params
        .attribute
        .as_deref()
        .ok_or_else(|| "no attribute given".to_string())
}

/// Mutates `state` according to `cmd`.
fn apply(cmd: &ExecutableCommand, state: &mut ViewState, dataset: &Dataset) -> Result<Effect, String> {
    let targets = &cmd.targets;
    let global = cmd.scope == Scope::Global;
    let mut effect = Effect {
        count: targets.len(),
        summary: None,
    };
    let err = |e: layout::LayoutError| e.to_string();
    match cmd.operation {
        OperationKind::AssignAxis => {
            let direction = cmd.params.direction.ok_or("no direction given")?;
            let result =
                layout::assign_axis(state, dataset, direction, attribute(cmd)?, targets, global).map_err(err)?;
            state.apply_layout(result);
        }
        OperationKind::Filter => {
            let mode = cmd.params.filter_mode.unwrap_or(FilterMode::Remove);
            let removed = state.apply_filter(targets, mode);
            if removed.is_empty() {
                return Err("no points would be removed".into());
            }
            effect.count = removed.len();
        }
        OperationKind::ColorBy => {
            let outcome = layout::color_by(state, dataset, attribute(cmd)?, (!global).then_some(targets.as_slice()))
                .map_err(err)?;
            for (id, rgb) in outcome.fills {
                let p = state.point_mut(id);
                if global {
                    if !p.color.is_explicit() {
                        p.color = Paint::Bound(rgb);
                    }
                } else {
                    p.color = Paint::Explicit(rgb);
                }
            }
            if global {
                state.global.color_by = Some(outcome.binding);
            }
        }
        OperationKind::SizeBy => {
            let outcome = layout::size_by(state, dataset, attribute(cmd)?, (!global).then_some(targets.as_slice()))
                .map_err(err)?;
            for (id, r) in outcome.radii {
                let p = state.point_mut(id);
                if global {
                    if !p.size.is_explicit() {
                        p.size = Radius::Bound(r);
                    }
                } else {
                    p.size = Radius::Explicit(r);
                }
            }
            if global {
                state.global.size_by = Some(outcome.binding);
            }
        }
        OperationKind::OrderBy => {
            let result = layout::order_by(state, dataset, targets, attribute(cmd)?).map_err(err)?;
            state.apply_layout(result);
        }
        OperationKind::Move => {
            let destination = match cmd.params.destination {
                Some(Destination::Region { region }) => region.anchor(&state.canvas),
                Some(Destination::Point { x, y }) => Point::new(x, y),
                _ => return Err("no location given".into()),
            };
            let result = layout::move_points(state, targets, destination).map_err(err)?;
            state.apply_layout(result);
        }
        OperationKind::ColorExplicit => {
            let rgb = cmd.params.color.ok_or("no color given")?.rgb();
            for &id in targets {
                state.point_mut(id).color = Paint::Explicit(rgb);
            }
        }
        OperationKind::SizeExplicit => {
            let r = cmd.params.size.ok_or("no size given")?;
            if !(r.is_finite() && r > 0.0) {
                return Err("size must be a positive number".into());
            }
            for &id in targets {
                state.point_mut(id).size = Radius::Explicit(r);
            }
        }
        OperationKind::Highlight => state.set_selection(targets.iter().copied()),
        OperationKind::Label => {
            for &id in targets {
                state.point_mut(id).label_visible = true;
            }
        }
        OperationKind::Summarize => {
            let summary = layout::summarize(state, dataset, targets);
            effect.count = summary.count;
            effect.summary = Some(summary);
        }
        OperationKind::Tag => {
            let tag = cmd.params.tag.as_deref().ok_or("no tag name given")?;
            state.tag_points(targets, tag);
        }
        OperationKind::Clear => clear(state, cmd.params.clear.ok_or("nothing to clear")?),
        OperationKind::Restore => {
            let restored = state.restore_from_bin(targets);
            place_restored(state, dataset, &restored);
            effect.count = restored.len();
        }
        OperationKind::Undo => return Err("undo is handled by the session".into()),
    }
    Ok(effect)
}

fn clear(state: &mut ViewState, what: ClearTarget) {
    match what {
        ClearTarget::Labels => state.points.iter_mut().for_each(|p| p.label_visible = false),
        ClearTarget::Colors => {
            state
                .points
                .iter_mut()
                .for_each(|p| p.color = Paint::Bound(DEFAULT_FILL));
            state.global.color_by = None;
        }
        ClearTarget::Sizes => {
            state
                .points
                .iter_mut()
                .for_each(|p| p.size = Radius::Bound(DEFAULT_RADIUS));
            state.global.size_by = None;
        }
        ClearTarget::Selection => state.clear_selection(),
        ClearTarget::Annotations => state.annotations.clear(),
        ClearTarget::Tags => state.points.iter_mut().for_each(|p| p.tags.clear()),
        ClearTarget::Axes => {
            state.global.x_axis = None;
            state.global.y_axis = None;
            state
                .locals
                .retain(|l| !matches!(l.arrangement, Arrangement::Axis { .. }));
        }
    }
}

/// Restored points rejoin global axes at their mapped coordinate. A point
/// whose value is missing or falls outside the canvas is pinned where it
/// was instead, since no axis position represents it.
fn place_restored(state: &mut ViewState, dataset: &Dataset, ids: &[u32]) {
    for &id in ids {
        for direction in [Direction::Horizontal, Direction::Vertical] {
            let Some(scale) = state.global.axis(direction).cloned() else {
                continue;
            };
            if state.point(id).pinned {
                break;
            }
            let value = dataset.value_by_name(id, &scale.attribute);
            let coord = match (&scale.kind, value) {
                (ScaleKind::Linear { .. }, Some(v)) => v.as_number().map(|n| scale.map(n)),
                (ScaleKind::Band { .. }, Some(v)) => {
                    let key = v.as_text().map(str::to_string).unwrap_or_else(|| "NA".into());
                    scale.band_of(&key).map(|(a, b)| (a + b) / 2.0)
                }
                _ => None,
            };
            let limit = match direction {
                Direction::Horizontal => state.canvas.width,
                Direction::Vertical => state.canvas.height,
            };
            let p = state.point_mut(id);
            match coord {
                Some(c) if (0.0..=limit).contains(&c) => match direction {
                    Direction::Horizontal => p.position.x = c,
                    Direction::Vertical => p.position.y = c,
                },
                _ => p.pinned = true,
            }
        }
    }
}

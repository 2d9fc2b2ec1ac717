//! Conversational context: the last executed operation, its parameters,
//! targets and gesture, used to complete follow-up and repeat commands.

use serde::{Deserialize, Serialize};

use crate::fusion::{ExecutableCommand, GestureMemo};
use crate::nl::{Interpretation, OperationKind, Params, Slot, TargetPolicy};
use crate::view_state::TargetSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextObject {
    pub operation: OperationKind,
    pub params: Params,
    /// Spec as executed; a selection is frozen to the ids it resolved to.
    pub target_spec: Option<TargetSpec>,
    pub target_ids: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gesture: Option<GestureMemo>,
    pub command_index: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Followup {
    Complete {
        interpretation: Interpretation,
        inferred: bool,
    },
    /// Still missing something after consulting context.
    Partial { interpretation: Interpretation },
}

/// Fills whatever the command leaves out from the context object. Complete
/// commands only inherit targets; repeats inherit the operation and
/// parameters too.
pub fn resolve_followup(mut interp: Interpretation, ctx: Option<&ContextObject>) -> Followup {
    let Some(ctx) = ctx else {
        return if interp.is_complete() {
            Followup::Complete {
                interpretation: interp,
                inferred: false,
            }
        } else {
            Followup::Partial { interpretation: interp }
        };
    };
    let mut inferred = false;
    if interp.repeat {
        interp = handle_repetition(interp, ctx);
        inferred = true;
    }
    if interp.operation.is_none() {
        interp.operation = Some(ctx.operation);
        inferred = true;
    }
    let op = interp.operation.expect("set above");
    let req = op.requirements();
    for slot in req.mandatory.iter().chain(req.fusable) {
        if compatible(op, ctx, *slot) && interp.params.fill_from(&ctx.params, *slot) {
            inferred = true;
        }
    }
    if op == OperationKind::AssignAxis && interp.params.direction.is_none() {
        if let Some(GestureMemo::Swipe { direction }) = ctx.gesture {
            interp.params.direction = Some(direction);
            inferred = true;
        }
    }
    let takes_targets = matches!(req.targets, TargetPolicy::DefaultAll | TargetPolicy::SelectionRequired);
    if takes_targets && interp.target.is_none() {
        if let Some(spec) = &ctx.target_spec {
            if *spec != TargetSpec::AllVisible {
                inferred = true;
            }
            interp.target = Some(spec.clone());
        }
    }
    if interp.is_complete() {
        Followup::Complete {
            interpretation: interp,
            inferred,
        }
    } else {
        Followup::Partial { interpretation: interp }
    }
}

/// A parameter is reused only when the previous operation used it the same
/// way: a color-by attribute may feed order-by, but a tag name never
/// becomes a clear target.
fn compatible(op: OperationKind, ctx: &ContextObject, slot: Slot) -> bool {
    match slot {
        Slot::Attribute => ctx.operation.takes_attribute() && op.takes_attribute(),
        Slot::Direction => ctx.params.direction.is_some(),
        _ => ctx.operation == op,
    }
}

/// "repeat", "same", "these too": the previous operation and parameters,
/// overlaid with anything the new command says.
pub fn handle_repetition(mut interp: Interpretation, ctx: &ContextObject) -> Interpretation {
    interp.repeat = false;
    if interp.operation.is_none() {
        interp.operation = Some(ctx.operation);
    }
    if interp.operation == Some(ctx.operation) {
        interp.params = ctx.params.merged(&interp.params);
    }
    interp
}

/// New context after `cmd` executed. Each field is either the command's own
/// value or the prior one; the gesture changes only if the command used one.
pub fn refresh(prev: Option<&ContextObject>, cmd: &ExecutableCommand) -> ContextObject {
    let target_spec = match &cmd.target_spec {
        Some(TargetSpec::Selection) => Some(TargetSpec::Ids {
            ids: cmd.targets.clone(),
        }),
        Some(spec) => Some(spec.clone()),
        None => prev.and_then(|p| p.target_spec.clone()),
    };
    let target_ids = if cmd.target_spec.is_some() {
        cmd.targets.clone()
    } else {
        prev.map(|p| p.target_ids.clone()).unwrap_or_default()
    };
    ContextObject {
        operation: cmd.operation,
        params: prev.map_or_else(|| cmd.params.clone(), |p| p.params.merged(&cmd.params)),
        target_spec,
        target_ids,
        gesture: cmd.gesture.or_else(|| prev.and_then(|p| p.gesture)),
        command_index: prev.map_or(1, |p| p.command_index + 1),
    }
}

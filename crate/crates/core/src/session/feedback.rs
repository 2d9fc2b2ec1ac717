//! Feedback messages and their text templates.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::fusion::{ExecutableCommand, Scope};
use crate::geometry::Direction;
use crate::layout::Summary;
use crate::nl::{Ambiguity, OperationKind};
use crate::text::format_number;
use crate::view_state::{FilterMode, TargetSpec};

const FEEDBACK_JSON: &str = include_str!("../resources/feedback.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    Success,
    FollowupInferred,
    PartialSuggestion,
    Failure,
    DiscoveryHint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackMessage {
    pub kind: FeedbackKind,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example_command: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ambiguities: Vec<Ambiguity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
}

impl FeedbackMessage {
    pub fn new(kind: FeedbackKind, text: impl Into<String>) -> FeedbackMessage {
        FeedbackMessage {
            kind,
            text: text.into(),
            example_command: None,
            ambiguities: Vec::new(),
            summary: None,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct Hint {
    pub action: String,
    pub command: String,
}

#[derive(Debug, Deserialize)]
pub struct Templates {
    pub version: u32,
    pub success: BTreeMap<String, String>,
    pub followup: String,
    pub partial: String,
    pub failure: BTreeMap<String, String>,
    pub hint: String,
    pub hints: BTreeMap<String, Hint>,
}

pub fn templates() -> &'static Templates {
    static T: OnceLock<Templates> = OnceLock::new();
    T.get_or_init(|| serde_json::from_str(FEEDBACK_JSON).expect("bundled feedback templates are valid"))
}

/// Substitutes `{name}` placeholders.
pub fn render(template: &str, vars: &[(&str, String)]) -> String {
    let mut out = template.to_string();
    for (k, v) in vars {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    out
}

pub fn failure(key: &str, vars: &[(&str, String)]) -> FeedbackMessage {
    let t = templates();
    let text = t.failure.get(key).map_or_else(|| key.to_string(), |s| render(s, vars));
    FeedbackMessage::new(FeedbackKind::Failure, text)
}

pub fn partial(explanation: &str, example: String) -> FeedbackMessage {
    let text = render(
        &templates().partial,
        &[("explanation", explanation.to_string()), ("example", example.clone())],
    );
    FeedbackMessage {
        example_command: Some(example),
        ..FeedbackMessage::new(FeedbackKind::PartialSuggestion, text)
    }
}

fn direction_word(d: Option<Direction>) -> String {
    match d {
        Some(Direction::Vertical) => "vertically".into(),
        _ => "horizontally".into(),
    }
}

pub fn describe_targets(spec: Option<&TargetSpec>, count: usize) -> String {
    match spec {
        None | Some(TargetSpec::AllVisible) => "points".into(),
        Some(TargetSpec::Selection) | Some(TargetSpec::Ids { .. }) => {
            if count == 1 {
                "the selected point".into()
            } else {
                format!("the {count} selected points")
            }
        }
        Some(TargetSpec::Tag { tag }) => format!("points tagged {tag}"),
        Some(TargetSpec::Where { predicate }) => format!("points where {}", predicate.describe()),
    }
}

fn template_key(cmd: &ExecutableCommand) -> String {
    match (cmd.operation, cmd.params.filter_mode) {
        (OperationKind::Filter, Some(FilterMode::KeepOnly)) => "filter_keep_only".into(),
        (OperationKind::Filter, _) => "filter_remove".into(),
        (op, _) => op.name().to_string(),
    }
}

fn vars(cmd: &ExecutableCommand, count: usize) -> Vec<(&'static str, String)> {
    let p = &cmd.params;
    vec![
        ("targets", describe_targets(cmd.target_spec.as_ref(), cmd.targets.len())),
        ("count", count.to_string()),
        ("direction", direction_word(p.direction)),
        ("attribute", p.attribute.clone().unwrap_or_default()),
        ("destination", p.destination.map(|d| d.describe()).unwrap_or_default()),
        ("color", p.color.map(|c| c.name().to_string()).unwrap_or_default()),
        ("size", p.size.map(format_number).unwrap_or_default()),
        ("tag", p.tag.clone().unwrap_or_default()),
        ("clear", p.clear.map(|c| c.name().to_string()).unwrap_or_default()),
        (
            "these",
            match cmd.scope {
                Scope::Global => "all points".into(),
                Scope::Local => "these".into(),
            },
        ),
    ]
}

/// Success text naming the operation and its values; `count` is the number
/// of points affected where the template reports one.
pub fn success(cmd: &ExecutableCommand, count: usize) -> FeedbackMessage {
    let t = templates();
    let key = template_key(cmd);
    let text = render(t.success.get(&key).map_or("Done", String::as_str), &vars(cmd, count));
    if cmd.inferred {
        FeedbackMessage::new(FeedbackKind::FollowupInferred, render(&t.followup, &[("text", text)]))
    } else {
        FeedbackMessage::new(FeedbackKind::Success, text)
    }
}

/// The spoken equivalent of a direct-manipulation command, as
/// `(action phrase, command)`.
pub fn speech_equivalent(cmd: &ExecutableCommand) -> Option<(String, String)> {
    let hint = templates().hints.get(&template_key(cmd))?;
    let v = vars(cmd, cmd.targets.len());
    Some((render(&hint.action, &v), render(&hint.command, &v)))
}

pub fn hint(action: &str, command: &str) -> FeedbackMessage {
    let text = render(
        &templates().hint,
        &[("action", action.to_string()), ("command", command.to_string())],
    );
    FeedbackMessage {
        example_command: Some(command.to_string()),
        ..FeedbackMessage::new(FeedbackKind::DiscoveryHint, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_operation_has_templates() {
        let t = templates();
        for op in OperationKind::ALL {
            let key = if op == OperationKind::Filter {
                "filter_remove"
            } else {
                op.name()
            };
            assert!(t.success.contains_key(key), "{key}");
            assert!(t.hints.contains_key(key), "{key}");
        }
    }

    #[test]
    fn followup_mentions_undo() {
        assert!(templates().followup.contains("undo"));
    }

    #[test]
    fn render_replaces_all() {
        assert_eq!(render("{a} and {a}", &[("a", "x".into())]), "x and x");
    }
}

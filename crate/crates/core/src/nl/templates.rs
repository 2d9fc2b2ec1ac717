use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use super::{Destination, Grammar, Interpretation, OperationKind, Params};
use crate::dataset::Referent;
use crate::text::{as_number, canonical, is_item_noun, normalize};
use crate::view_state::{Predicate, TargetSpec};

const TEMPLATES_JSON: &str = include_str!("../resources/templates.json");
const MAX_SLOT_TOKENS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotType {
    Attribute,
    AttributeValue,
    Color,
    Region,
    Number,
    Comparator,
}

impl SlotType {
    fn parse(s: &str) -> Option<SlotType> {
        Some(match s {
            "attribute" => SlotType::Attribute,
            "attribute_value" => SlotType::AttributeValue,
            "color" => SlotType::Color,
            "region" => SlotType::Region,
            "number" => SlotType::Number,
            "comparator" => SlotType::Comparator,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Element {
    Literal(String),
    Slot(SlotType),
}

#[derive(Debug, Clone, Deserialize)]
struct RawTemplate {
    pattern: String,
    #[serde(default)]
    operation: Option<OperationKind>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    repeat: bool,
}

#[derive(Debug, Deserialize)]
struct RawFile {
    #[allow(dead_code)]
    version: u32,
    templates: Vec<RawTemplate>,
}

#[derive(Debug, Clone)]
pub struct Template {
    pub pattern: String,
    pub operation: Option<OperationKind>,
    pub params: Params,
    pub repeat: bool,
    elements: Vec<Element>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TemplateError {
    #[error("template file: {0}")]
    Json(String),
    #[error("template '{pattern}': unknown slot type '{slot}'")]
    UnknownSlot { pattern: String, slot: String },
    #[error("template '{0}' has neither an operation nor the repeat flag")]
    NoOperation(String),
}

impl Template {
    /// Parses a template file; literals go through the same normalization as
    /// utterances so that "size by [attribute]" matches on `[size, <attr>]`.
    pub fn load(json: &str) -> Result<Vec<Template>, TemplateError> {
        let raw: RawFile = serde_json::from_str(json).map_err(|e| TemplateError::Json(e.to_string()))?;
        raw.templates
            .into_iter()
            .map(|t| {
                if t.operation.is_none() && !t.repeat {
                    return Err(TemplateError::NoOperation(t.pattern));
                }
                let mut elements = Vec::new();
                for word in t.pattern.split_whitespace() {
                    if let Some(inner) = word.strip_prefix('[').and_then(|w| w.strip_suffix(']')) {
                        let slot = SlotType::parse(inner).ok_or_else(|| TemplateError::UnknownSlot {
                            pattern: t.pattern.clone(),
                            slot: inner.to_string(),
                        })?;
                        elements.push(Element::Slot(slot));
                    } else {
                        elements.extend(match_tokens(&normalize(word)).into_iter().map(Element::Literal));
                    }
                }
                Ok(Template {
                    pattern: t.pattern,
                    operation: t.operation,
                    params: t.params,
                    repeat: t.repeat,
                    elements,
                })
            })
            .collect()
    }
}

pub(super) fn builtin() -> &'static [Template] {
    static T: OnceLock<Vec<Template>> = OnceLock::new();
    T.get_or_init(|| Template::load(TEMPLATES_JSON).expect("bundled templates are valid"))
}

fn match_tokens(tokens: &[String]) -> Vec<String> {
    tokens
        .iter()
        .map(|t| canonical(t))
        .filter(|t| !is_item_noun(t))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Filled {
    Attribute(String),
    Value(String, String),
    Color(crate::color::NamedColor),
    Region(crate::geometry::RegionKeyword),
    Number(f64),
    Comparator,
}

/// First template (in declared order) whose literals match and whose slots
/// each resolve to exactly one lexicon referent of the slot's type.
pub fn match_templates(tokens: &[String], templates: &[Template], grammar: &Grammar) -> Option<Interpretation> {
    let words = match_tokens(tokens);
    if words.is_empty() {
        return None;
    }
    for t in templates {
        let mut filled = Vec::new();
        if match_from(&t.elements, &words, grammar, &mut filled) {
            return Some(build(t, filled, tokens));
        }
    }
    None
}

fn match_from(elements: &[Element], words: &[String], grammar: &Grammar, filled: &mut Vec<Filled>) -> bool {
    let Some((first, rest)) = elements.split_first() else {
        return words.is_empty();
    };
    match first {
        Element::Literal(l) => words.first() == Some(l) && match_from(rest, &words[1..], grammar, filled),
        Element::Slot(ty) => {
            for n in 1..=MAX_SLOT_TOKENS.min(words.len()) {
                if let Some(f) = resolve_slot(*ty, &words[..n], grammar) {
                    filled.push(f);
                    if match_from(rest, &words[n..], grammar, filled) {
                        return true;
                    }
                    filled.pop();
                }
            }
            false
        }
    }
}

fn resolve_slot(ty: SlotType, key: &[String], grammar: &Grammar) -> Option<Filled> {
    match ty {
        SlotType::Number => {
            return (key.len() == 1)
                .then(|| as_number(&key[0]))
                .flatten()
                .map(Filled::Number);
        }
        SlotType::Comparator => {
            return (key.len() == 1 && super::ngram::comparator_word(&key[0]).is_some()).then_some(Filled::Comparator);
        }
        _ => {}
    }
    let entries = grammar.exact.get(key)?;
    let mut hits = entries
        .iter()
        .map(|i| &grammar.lexicon.entries[*i].referent)
        .filter_map(|r| match (ty, r) {
            (SlotType::Attribute, Referent::Attribute { attribute }) => Some(Filled::Attribute(attribute.clone())),
            (SlotType::AttributeValue, Referent::AttributeValue { attribute, value }) => {
                Some(Filled::Value(attribute.clone(), value.clone()))
            }
            (SlotType::Color, Referent::ColorName { color }) => Some(Filled::Color(*color)),
            (SlotType::Region, Referent::CanvasRegion { region }) => Some(Filled::Region(*region)),
            _ => None,
        });
    let first = hits.next()?;
    // several distinct referents of the same kind are left to the ambiguity path
    hits.all(|h| h == first).then_some(first)
}

fn build(t: &Template, filled: Vec<Filled>, tokens: &[String]) -> Interpretation {
    let mut params = t.params.clone();
    let mut groups: Vec<(String, Vec<String>)> = Vec::new();
    for f in filled {
        match f {
            Filled::Attribute(a) => params.attribute = Some(a),
            Filled::Value(a, v) => match groups.iter_mut().find(|(g, _)| *g == a) {
                Some((_, vs)) => vs.push(v),
                None => groups.push((a, vec![v])),
            },
            Filled::Color(c) => params.color = Some(c),
            Filled::Region(r) => params.destination = Some(Destination::Region { region: r }),
            Filled::Number(n) => params.size = Some(n),
            Filled::Comparator => {}
        }
    }
    let target = (!groups.is_empty()).then(|| TargetSpec::Where {
        predicate: Predicate::and(
            groups
                .into_iter()
                .map(|(attribute, values)| Predicate::ValueIn { attribute, values })
                .collect(),
        ),
    });
    Interpretation {
        operation: t.operation,
        params,
        target,
        ambiguities: Vec::new(),
        confidence: 1.0,
        source_span: vec![tokens.join(" ")],
        repeat: t.repeat,
    }
}

//! Natural-language command parsing: template matching first, then n-gram
//! similarity matching against the dataset lexicon.

mod ngram;
pub mod similarity;
mod templates;

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::color::NamedColor;
use crate::dataset::{build_lexicon, ClearTarget, Lexicon, Referent};
use crate::dataset::{AttributeKind, Dataset};
use crate::geometry::{Direction, Point, RegionKeyword};
use crate::view_state::{FilterMode, Predicate, TargetSpec};
use similarity::Features;

pub use crate::text::normalize;
pub use ngram::ngram_match;
pub use templates::{match_templates, Template, TemplateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationKind {
    AssignAxis,
    Filter,
    ColorBy,
    SizeBy,
    OrderBy,
    Move,
    ColorExplicit,
    SizeExplicit,
    Highlight,
    Label,
    Summarize,
    Tag,
    Undo,
    Clear,
    Restore,
}

impl OperationKind {
    pub const ALL: [OperationKind; 15] = [
        OperationKind::AssignAxis,
        OperationKind::Filter,
        OperationKind::ColorBy,
        OperationKind::SizeBy,
        OperationKind::OrderBy,
        OperationKind::Move,
        OperationKind::ColorExplicit,
        OperationKind::SizeExplicit,
        OperationKind::Highlight,
        OperationKind::Label,
        OperationKind::Summarize,
        OperationKind::Tag,
        OperationKind::Undo,
        OperationKind::Clear,
        OperationKind::Restore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperationKind::AssignAxis => "assign_axis",
            OperationKind::Filter => "filter",
            OperationKind::ColorBy => "color_by",
            OperationKind::SizeBy => "size_by",
            OperationKind::OrderBy => "order_by",
            OperationKind::Move => "move",
            OperationKind::ColorExplicit => "color_explicit",
            OperationKind::SizeExplicit => "size_explicit",
            OperationKind::Highlight => "highlight",
            OperationKind::Label => "label",
            OperationKind::Summarize => "summarize",
            OperationKind::Tag => "tag",
            OperationKind::Undo => "undo",
            OperationKind::Clear => "clear",
            OperationKind::Restore => "restore",
        }
    }

    pub fn requirements(self) -> Requirements {
        use Slot::*;
        use TargetPolicy::*;
        let (mandatory, fusable, targets): (&'static [Slot], &'static [Slot], TargetPolicy) = match self {
            OperationKind::AssignAxis => (&[Attribute], &[Direction], DefaultAll),
            OperationKind::Filter => (&[], &[], SelectionRequired),
            OperationKind::ColorBy | OperationKind::SizeBy | OperationKind::OrderBy => (&[Attribute], &[], DefaultAll),
            OperationKind::Move => (&[], &[Destination], SelectionRequired),
            OperationKind::ColorExplicit => (&[Color], &[], SelectionRequired),
            OperationKind::SizeExplicit => (&[Size], &[], SelectionRequired),
            OperationKind::Highlight => (&[], &[], SelectionRequired),
            OperationKind::Label | OperationKind::Summarize => (&[], &[], DefaultAll),
            OperationKind::Tag => (&[Tag], &[], SelectionRequired),
            OperationKind::Undo => (&[], &[], NoTargets),
            OperationKind::Clear => (&[Clear], &[], NoTargets),
            OperationKind::Restore => (&[], &[], Bin),
        };
        Requirements {
            mandatory,
            fusable,
            targets,
        }
    }

    pub fn takes_attribute(self) -> bool {
        self.requirements().mandatory.contains(&Slot::Attribute)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Attribute,
    Value,
    Direction,
    Color,
    Destination,
    Size,
    Tag,
    Clear,
}

/// How an operation obtains its target set when the utterance names none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetPolicy {
    NoTargets,
    /// All visible points when nothing is selected.
    DefaultAll,
    /// The active selection; never silently widened to every point.
    SelectionRequired,
    /// Points in the filter bin.
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirements {
    pub mandatory: &'static [Slot],
    pub fusable: &'static [Slot],
    pub targets: TargetPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Destination {
    Region {
        region: RegionKeyword,
    },
    /// Deictic "here": filled from the pointer during fusion.
    Here,
    Point {
        x: f64,
        y: f64,
    },
}

impl Destination {
    pub fn describe(&self) -> String {
        match self {
            Destination::Region { region } => format!("the {}", region.phrase()),
            Destination::Here => "here".into(),
            Destination::Point { x, y } => format!("({x:.0}, {y:.0})"),
        }
    }

    pub fn point(p: Point) -> Destination {
        Destination::Point { x: p.x, y: p.y }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<NamedColor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<Destination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_mode: Option<FilterMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clear: Option<ClearTarget>,
}

impl Params {
    pub fn has(&self, slot: Slot) -> bool {
        match slot {
            Slot::Attribute => self.attribute.is_some(),
            Slot::Value => false,
            Slot::Direction => self.direction.is_some(),
            Slot::Color => self.color.is_some(),
            Slot::Destination => self.destination.is_some(),
            Slot::Size => self.size.is_some(),
            Slot::Tag => self.tag.is_some(),
            Slot::Clear => self.clear.is_some(),
        }
    }

    /// Copies `slot` from `other` when absent here; returns whether it did.
    pub fn fill_from(&mut self, other: &Params, slot: Slot) -> bool {
        if self.has(slot) || !other.has(slot) {
            return false;
        }
        match slot {
            Slot::Attribute => self.attribute = other.attribute.clone(),
            Slot::Direction => self.direction = other.direction,
            Slot::Color => self.color = other.color,
            Slot::Destination => self.destination = other.destination,
            Slot::Size => self.size = other.size,
            Slot::Tag => self.tag = other.tag.clone(),
            Slot::Clear => self.clear = other.clear,
            Slot::Value => return false,
        }
        true
    }

    /// Slot-wise overlay: values present in `newer` win.
    pub fn merged(&self, newer: &Params) -> Params {
        Params {
            attribute: newer.attribute.clone().or_else(|| self.attribute.clone()),
            direction: newer.direction.or(self.direction),
            color: newer.color.or(self.color),
            destination: newer.destination.or(self.destination),
            size: newer.size.or(self.size),
            filter_mode: newer.filter_mode.or(self.filter_mode),
            tag: newer.tag.clone().or_else(|| self.tag.clone()),
            clear: newer.clear.or(self.clear),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(flatten)]
    pub referent: Referent,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub slot: Slot,
    /// Score order; the first is the provisional value.
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    pub operation: Option<OperationKind>,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ambiguities: Vec<Ambiguity>,
    pub confidence: f64,
    #[serde(default)]
    pub source_span: Vec<String>,
    /// "repeat", "these too": reuse the previous operation.
    #[serde(default)]
    pub repeat: bool,
}

impl Interpretation {
    pub fn missing_mandatory(&self) -> Vec<Slot> {
        match self.operation {
            None => Vec::new(),
            Some(op) => op
                .requirements()
                .mandatory
                .iter()
                .copied()
                .filter(|s| !self.params.has(*s))
                .collect(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.operation.is_some() && !self.repeat && self.missing_mandatory().is_empty()
    }

    /// Replaces the provisional referent of an ambiguity with `with`.
    pub fn substitute(&mut self, from: &Referent, with: &Referent) {
        match (from, with) {
            (Referent::Attribute { attribute: a }, Referent::Attribute { attribute: b }) => {
                if self.params.attribute.as_deref() == Some(a.as_str()) {
                    self.params.attribute = Some(b.clone());
                }
                if let Some(TargetSpec::Where { predicate }) = &mut self.target {
                    rename_compare(predicate, a, b);
                }
            }
            (
                Referent::AttributeValue {
                    attribute: a,
                    value: va,
                },
                Referent::AttributeValue {
                    attribute: b,
                    value: vb,
                },
            ) => {
                if let Some(TargetSpec::Where { predicate }) = &mut self.target {
                    replace_value(predicate, (a, va), (b, vb));
                }
            }
            _ => {}
        }
        for amb in &mut self.ambiguities {
            if amb.candidates.first().map(|c| &c.referent) == Some(from) {
                if let Some(i) = amb.candidates.iter().position(|c| &c.referent == with) {
                    let chosen = amb.candidates.remove(i);
                    amb.candidates.insert(0, chosen);
                }
            }
        }
    }
}

fn rename_compare(p: &mut Predicate, from: &str, to: &str) {
    match p {
        Predicate::Compare { attribute, .. } if attribute == from => *attribute = to.to_string(),
        Predicate::Not { inner } => rename_compare(inner, from, to),
        Predicate::And { all } => all.iter_mut().for_each(|q| rename_compare(q, from, to)),
        _ => {}
    }
}

fn replace_value(p: &mut Predicate, from: (&str, &str), to: (&str, &str)) {
    match p {
        Predicate::ValueIn { attribute, values } if attribute == from.0 => {
            if let Some(v) = values.iter_mut().find(|v| *v == from.1) {
                *v = to.1.to_string();
                if from.0 != to.0 {
                    // a value of another attribute: split into its own clause
                    if values.len() == 1 {
                        *attribute = to.0.to_string();
                    } else {
                        values.retain(|v| v != to.1);
                        let moved = Predicate::ValueIn {
                            attribute: to.0.to_string(),
                            values: vec![to.1.to_string()],
                        };
                        let old = std::mem::replace(p, Predicate::And { all: vec![] });
                        *p = Predicate::And { all: vec![old, moved] };
                    }
                }
            }
        }
        Predicate::Not { inner } => replace_value(inner, from, to),
        Predicate::And { all } => all.iter_mut().for_each(|q| replace_value(q, from, to)),
        _ => {}
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ParseOutcome {
    Complete {
        interpretation: Interpretation,
    },
    /// Something was recognized but a mandatory piece is missing. The
    /// interpretation keeps whatever was found so context can fill the rest.
    Partial {
        interpretation: Interpretation,
        explanation: String,
        example_command: String,
    },
    Unintelligible,
    /// Clauses joined by "then", executed in order.
    Sequence {
        steps: Vec<Interpretation>,
    },
}

impl ParseOutcome {
    pub fn operation(&self) -> Option<OperationKind> {
        match self {
            ParseOutcome::Complete { interpretation } | ParseOutcome::Partial { interpretation, .. } => {
                interpretation.operation
            }
            ParseOutcome::Sequence { steps } => steps.first().and_then(|s| s.operation),
            ParseOutcome::Unintelligible => None,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, ParseOutcome::Complete { .. } | ParseOutcome::Sequence { .. })
    }
}

/// Lexicon plus the dataset facts the parser needs, with precomputed match features.
#[derive(Debug, Clone)]
pub struct Grammar {
    lexicon: Lexicon,
    features: Vec<Features>,
    exact: HashMap<Vec<String>, Vec<usize>>,
    templates: Vec<Template>,
    quantitative: BTreeSet<String>,
    /// Attributes suitable for example commands (identifier columns excluded).
    example_attributes: Vec<(String, AttributeKind)>,
}

impl Grammar {
    pub fn new(dataset: &Dataset) -> Grammar {
        Grammar::from_parts(
            build_lexicon(dataset),
            dataset
                .schema()
                .iter()
                .filter(|a| a.is_quantitative())
                .map(|a| a.name.clone())
                .collect(),
            dataset
                .schema()
                .iter()
                .filter(|a| !is_identifier(a, dataset.len()))
                .map(|a| (a.name.clone(), a.kind))
                .collect(),
        )
    }

    fn from_parts(
        lexicon: Lexicon,
        quantitative: BTreeSet<String>,
        example_attributes: Vec<(String, AttributeKind)>,
    ) -> Grammar {
        let features: Vec<Features> = lexicon.iter().map(|e| Features::new(&e.key)).collect();
        let mut exact: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
        for (i, e) in lexicon.iter().enumerate() {
            exact.entry(e.key.clone()).or_default().push(i);
        }
        Grammar {
            lexicon,
            features,
            exact,
            templates: templates::builtin().to_vec(),
            quantitative,
            example_attributes,
        }
    }

    /// Copy that also recognizes the given session tags.
    pub fn with_tags<'a>(&self, tags: impl IntoIterator<Item = &'a str>) -> Grammar {
        let tags: Vec<&str> = tags.into_iter().collect();
        if tags.is_empty() {
            return self.clone();
        }
        Grammar::from_parts(
            self.lexicon.with_tags(tags),
            self.quantitative.clone(),
            self.example_attributes.clone(),
        )
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn is_quantitative(&self, attribute: &str) -> bool {
        self.quantitative.contains(attribute)
    }

    /// Full pipeline: clause split, templates, n-gram fallback, ambiguity
    /// detection. `rng` only picks values for example commands.
    pub fn parse<R: Rng>(&self, utterance: &str, rng: &mut R) -> ParseOutcome {
        let clauses = split_clauses(utterance);
        if clauses.len() > 1 {
            let mut steps = Vec::new();
            for c in &clauses {
                match self.parse_clause(c, rng) {
                    ParseOutcome::Complete { interpretation } => steps.push(interpretation),
                    other => return other,
                }
            }
            return ParseOutcome::Sequence { steps };
        }
        self.parse_clause(utterance, rng)
    }

    fn parse_clause<R: Rng>(&self, utterance: &str, rng: &mut R) -> ParseOutcome {
        let tokens = normalize(utterance);
        if tokens.is_empty() {
            return ParseOutcome::Unintelligible;
        }
        let interp = match match_templates(&tokens, &self.templates, self) {
            Some(interp) => interp,
            None => match ngram_match(&tokens, self) {
                Some(interp) => detect_ambiguity(interp),
                None => return ParseOutcome::Unintelligible,
            },
        };
        self.finish(with_universal_target(interp, utterance), rng)
    }

    fn finish<R: Rng>(&self, interp: Interpretation, rng: &mut R) -> ParseOutcome {
        if interp.is_complete() {
            return ParseOutcome::Complete { interpretation: interp };
        }
        let explanation = self.explain(&interp);
        let example_command = self.example_command(&interp, rng);
        ParseOutcome::Partial {
            interpretation: interp,
            explanation,
            example_command,
        }
    }

    pub fn explain(&self, interp: &Interpretation) -> String {
        if interp.repeat {
            return "There is no previous command to repeat.".into();
        }
        let Some(op) = interp.operation else {
            return "I could not tell which operation you wanted.".into();
        };
        let missing = interp.missing_mandatory();
        let what = match missing.first() {
            Some(Slot::Attribute) => "which attribute to use",
            Some(Slot::Color) => "which color to use",
            Some(Slot::Size) => "which size to use",
            Some(Slot::Tag) => "what to call the tag",
            Some(Slot::Clear) => "what to clear",
            Some(Slot::Direction) => "which axis to use",
            Some(Slot::Destination) => "where to move the points",
            _ => "the rest of the command",
        };
        format!("I understood {} but not {what}.", verb(op))
    }

    fn random_attribute<R: Rng>(&self, quantitative_only: bool, rng: &mut R) -> String {
        let pool: Vec<&String> = self
            .example_attributes
            .iter()
            .filter(|(_, k)| !quantitative_only || *k == AttributeKind::Quantitative)
            .map(|(n, _)| n)
            .collect();
        pool.choose(rng)
            .map(|s| (*s).clone())
            .unwrap_or_else(|| "Region".into())
    }

    /// Runnable example that completes the interpretation, choosing a valid
    /// slot value at random.
    pub fn example_command<R: Rng>(&self, interp: &Interpretation, rng: &mut R) -> String {
        let attr = |q: bool, rng: &mut R| {
            interp
                .params
                .attribute
                .clone()
                .filter(|a| !q || self.is_quantitative(a))
                .unwrap_or_else(|| self.random_attribute(q, rng))
        };
        match interp.operation {
            Some(OperationKind::SizeBy) | Some(OperationKind::SizeExplicit) => {
                format!("Size by {}", attr(true, rng))
            }
            Some(OperationKind::OrderBy) => format!("Order by {}", attr(false, rng)),
            Some(OperationKind::AssignAxis) => {
                let dir = match interp.params.direction {
                    Some(Direction::Vertical) => "vertically",
                    _ => "horizontally",
                };
                format!("Align {dir} by {}", attr(false, rng))
            }
            Some(OperationKind::Tag) => "Tag these as favorites".into(),
            Some(OperationKind::Clear) => "Clear all labels".into(),
            _ => format!("Color by {}", attr(false, rng)),
        }
    }
}

/// Identifier-like columns: categorical with one distinct value per row.
fn is_identifier(attr: &crate::dataset::AttributeSchema, rows: usize) -> bool {
    attr.kind == AttributeKind::Categorical && rows > 1 && attr.categories().len() == rows
}

pub fn verb(op: OperationKind) -> &'static str {
    match op {
        OperationKind::AssignAxis => "assigning an axis",
        OperationKind::Filter => "filtering",
        OperationKind::ColorBy => "coloring by an attribute",
        OperationKind::SizeBy => "sizing by an attribute",
        OperationKind::OrderBy => "ordering",
        OperationKind::Move => "moving",
        OperationKind::ColorExplicit => "coloring",
        OperationKind::SizeExplicit => "resizing",
        OperationKind::Highlight => "highlighting",
        OperationKind::Label => "labeling",
        OperationKind::Summarize => "summarizing",
        OperationKind::Tag => "tagging",
        OperationKind::Undo => "undo",
        OperationKind::Clear => "clearing",
        OperationKind::Restore => "restoring",
    }
}

/// Splits on "then" / "and then" into separately parsed clauses.
pub fn split_clauses(utterance: &str) -> Vec<String> {
    let mut clauses: Vec<Vec<&str>> = vec![Vec::new()];
    for word in utterance.split_whitespace() {
        let bare = word.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
        if bare == "then" {
            let current = clauses.last_mut().expect("non-empty");
            while let Some(last) = current.last() {
                let b: String = last.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
                if b == "and" || b.is_empty() {
                    current.pop();
                } else {
                    break;
                }
            }
            clauses.push(Vec::new());
        } else {
            clauses.last_mut().expect("non-empty").push(word);
        }
    }
    clauses
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| c.join(" ").trim_end_matches([',', ';']).to_string())
        .collect()
}

/// Recomputes ambiguity entries: drops any whose top two candidates are
/// separated by at least the margin and orders candidates by score.
pub fn detect_ambiguity(mut interp: Interpretation) -> Interpretation {
    for amb in &mut interp.ambiguities {
        amb.candidates.sort_by(|a, b| b.score.total_cmp(&a.score));
        if let Some(top) = amb.candidates.first().map(|c| c.score) {
            amb.candidates.retain(|c| top - c.score < similarity::AMBIGUITY_MARGIN);
        }
    }
    interp.ambiguities.retain(|a| a.candidates.len() > 1);
    interp
}

/// Parses with an explicit lexicon built from `dataset` (convenience for tools).
/// "all points", "everything": an explicit request for every visible point,
/// which keeps a follow-up from inheriting the previous command's targets.
fn with_universal_target(mut interp: Interpretation, utterance: &str) -> Interpretation {
    let takes_targets = interp.operation.is_some_and(|op| {
        matches!(
            op.requirements().targets,
            TargetPolicy::DefaultAll | TargetPolicy::SelectionRequired
        )
    });
    let universal = utterance
        .split(|c: char| !c.is_alphanumeric())
        .any(|w| matches!(w.to_lowercase().as_str(), "all" | "every" | "everything" | "everyone"));
    if takes_targets && universal && interp.target.is_none() {
        interp.target = Some(TargetSpec::AllVisible);
    }
    interp
}

pub fn parse<R: Rng>(utterance: &str, dataset: &Dataset, rng: &mut R) -> ParseOutcome {
    Grammar::new(dataset).parse(utterance, rng)
}

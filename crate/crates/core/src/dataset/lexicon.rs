use serde::{Deserialize, Serialize};

use super::{AttributeKind, Dataset};
use crate::color::NamedColor;
use crate::geometry::{Direction, RegionKeyword};
use crate::text::{clean_phrase, phrase_key};

/// Coarse operation family named by a keyword; the parser refines it
/// (e.g. `Color` becomes color-by or explicit color depending on slots).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationClass {
    Order,
    Axis,
    Color,
    Size,
    Filter,
    Keep,
    Move,
    Highlight,
    Label,
    Summarize,
    Tag,
    Undo,
    Clear,
    Restore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClearTarget {
    Labels,
    Colors,
    Sizes,
    Selection,
    Annotations,
    Tags,
    Axes,
}

impl ClearTarget {
    pub fn name(self) -> &'static str {
        match self {
            ClearTarget::Labels => "labels",
            ClearTarget::Colors => "colors",
            ClearTarget::Sizes => "sizes",
            ClearTarget::Selection => "selection",
            ClearTarget::Annotations => "annotations",
            ClearTarget::Tags => "tags",
            ClearTarget::Axes => "axes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisualFlag {
    Pinned,
    Labeled,
    Selected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "keyword", content = "value", rename_all = "snake_case")]
pub enum Keyword {
    Operation(OperationClass),
    Direction(Direction),
    Clear(ClearTarget),
    Visual(VisualFlag),
    Repeat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "referent", rename_all = "snake_case")]
pub enum Referent {
    Attribute { attribute: String },
    AttributeValue { attribute: String, value: String },
    OperationKeyword { keyword: Keyword },
    ColorName { color: NamedColor },
    CanvasRegion { region: RegionKeyword },
    Tag { tag: String },
}

impl Referent {
    /// Stable label used in ambiguity widgets and source spans.
    pub fn display(&self) -> String {
        match self {
            Referent::Attribute { attribute } => attribute.clone(),
            Referent::AttributeValue { value, .. } => value.clone(),
            Referent::OperationKeyword { keyword } => format!("{keyword:?}"),
            Referent::ColorName { color } => color.name().to_string(),
            Referent::CanvasRegion { region } => region.phrase().to_string(),
            Referent::Tag { tag } => tag.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub phrase: String,
    #[serde(flatten)]
    pub referent: Referent,
    /// Normalized tokens used for matching.
    #[serde(skip)]
    pub key: Vec<String>,
}

impl LexiconEntry {
    pub fn new(phrase: &str, referent: Referent) -> Self {
        Self {
            phrase: clean_phrase(phrase),
            key: phrase_key(phrase),
            referent,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub entries: Vec<LexiconEntry>,
}

impl Lexicon {
    pub fn push(&mut self, phrase: &str, referent: Referent) {
        let entry = LexiconEntry::new(phrase, referent);
        if !entry.key.is_empty() && !self.entries.contains(&entry) {
            self.entries.push(entry);
        }
    }

    /// Copy with one `Tag` entry per session tag.
    pub fn with_tags<'a>(&self, tags: impl IntoIterator<Item = &'a str>) -> Lexicon {
        let mut out = self.clone();
        for t in tags {
            out.push(t, Referent::Tag { tag: t.to_string() });
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, phrase: &str) -> impl Iterator<Item = &Referent> {
        let p = clean_phrase(phrase);
        self.entries.iter().filter(move |e| e.phrase == p).map(|e| &e.referent)
    }
}

const OPERATION_KEYWORDS: &[(&str, OperationClass)] = &[
    ("order", OperationClass::Order),
    ("sort", OperationClass::Order),
    ("arrange", OperationClass::Order),
    ("rearrange", OperationClass::Order),
    ("reorder", OperationClass::Order),
    ("align", OperationClass::Axis),
    ("axis", OperationClass::Axis),
    ("assign", OperationClass::Axis),
    ("color", OperationClass::Color),
    ("paint", OperationClass::Color),
    ("size", OperationClass::Size),
    ("resize", OperationClass::Size),
    ("remove", OperationClass::Filter),
    ("filter", OperationClass::Filter),
    ("exclude", OperationClass::Filter),
    ("delete", OperationClass::Filter),
    ("drop", OperationClass::Filter),
    ("keep", OperationClass::Keep),
    ("only", OperationClass::Keep),
    ("move", OperationClass::Move),
    ("bring", OperationClass::Move),
    ("put", OperationClass::Move),
    ("place", OperationClass::Move),
    ("highlight", OperationClass::Highlight),
    ("label", OperationClass::Label),
    ("summarize", OperationClass::Summarize),
    ("summary", OperationClass::Summarize),
    ("histogram", OperationClass::Summarize),
    ("tag", OperationClass::Tag),
    ("undo", OperationClass::Undo),
    ("revert", OperationClass::Undo),
    ("clear", OperationClass::Clear),
    ("reset", OperationClass::Clear),
    ("restore", OperationClass::Restore),
];

const DIRECTION_WORDS: &[(&str, Direction)] = &[
    ("horizontally", Direction::Horizontal),
    ("horizontal", Direction::Horizontal),
    ("x", Direction::Horizontal),
    ("vertically", Direction::Vertical),
    ("vertical", Direction::Vertical),
    ("y", Direction::Vertical),
];

const CLEAR_WORDS: &[(&str, ClearTarget)] = &[
    ("selection", ClearTarget::Selection),
    ("ink", ClearTarget::Annotations),
    ("annotations", ClearTarget::Annotations),
    ("strokes", ClearTarget::Annotations),
    ("tags", ClearTarget::Tags),
    ("axes", ClearTarget::Axes),
];

const VISUAL_WORDS: &[(&str, VisualFlag)] = &[
    ("pinned", VisualFlag::Pinned),
    ("labeled", VisualFlag::Labeled),
    ("selected", VisualFlag::Selected),
];

const REPEAT_WORDS: &[&str] = &["repeat", "again", "too", "same"];

const REGION_PHRASES: &[(&str, RegionKeyword)] = &[
    ("top left", RegionKeyword::TopLeft),
    ("top left corner", RegionKeyword::TopLeft),
    ("top right", RegionKeyword::TopRight),
    ("top right corner", RegionKeyword::TopRight),
    ("bottom left", RegionKeyword::BottomLeft),
    ("bottom left corner", RegionKeyword::BottomLeft),
    ("bottom right", RegionKeyword::BottomRight),
    ("bottom right corner", RegionKeyword::BottomRight),
    ("top", RegionKeyword::Top),
    ("bottom", RegionKeyword::Bottom),
    ("left", RegionKeyword::Left),
    ("right", RegionKeyword::Right),
    ("center", RegionKeyword::Center),
];

/// Lexicon over the dataset's attributes and values plus the built-in
/// keyword, color and region vocabulary.
pub fn build_lexicon(dataset: &Dataset) -> Lexicon {
    let mut lex = builtin_lexicon();
    for attr in dataset.schema() {
        let referent = Referent::Attribute {
            attribute: attr.name.clone(),
        };
        lex.push(&attr.name, referent.clone());
        for alias in &attr.aliases {
            lex.push(alias, referent.clone());
        }
        if attr.kind == AttributeKind::Categorical {
            for v in attr.categories() {
                lex.push(
                    v,
                    Referent::AttributeValue {
                        attribute: attr.name.clone(),
                        value: v.clone(),
                    },
                );
            }
        }
    }
    lex
}

pub fn builtin_lexicon() -> Lexicon {
    let mut lex = Lexicon::default();
    for (p, op) in OPERATION_KEYWORDS {
        lex.push(
            p,
            Referent::OperationKeyword {
                keyword: Keyword::Operation(*op),
            },
        );
    }
    for (p, d) in DIRECTION_WORDS {
        lex.push(
            p,
            Referent::OperationKeyword {
                keyword: Keyword::Direction(*d),
            },
        );
    }
    for (p, c) in CLEAR_WORDS {
        lex.push(
            p,
            Referent::OperationKeyword {
                keyword: Keyword::Clear(*c),
            },
        );
    }
    for (p, v) in VISUAL_WORDS {
        lex.push(
            p,
            Referent::OperationKeyword {
                keyword: Keyword::Visual(*v),
            },
        );
    }
    for p in REPEAT_WORDS {
        lex.push(
            p,
            Referent::OperationKeyword {
                keyword: Keyword::Repeat,
            },
        );
    }
    for c in NamedColor::ALL {
        lex.push(c.name(), Referent::ColorName { color: c });
    }
    lex.push(
        "grey",
        Referent::ColorName {
            color: NamedColor::Gray,
        },
    );
    for (p, r) in REGION_PHRASES {
        lex.push(p, Referent::CanvasRegion { region: *r });
    }
    lex
}

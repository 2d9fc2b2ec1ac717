use std::collections::BTreeSet;

use super::similarity::{self, Features, AMBIGUITY_MARGIN, THRESHOLD};
use super::{Ambiguity, Candidate, Destination, Grammar, Interpretation, OperationKind, Slot};
use crate::color::NamedColor;
use crate::dataset::{ClearTarget, Keyword, OperationClass, Referent, VisualFlag};
use crate::geometry::RegionKeyword;
use crate::text::{as_number, canonical, is_item_noun, is_stopword};
use crate::view_state::{Comparator, FilterMode, Predicate, TargetSpec};

pub const MAX_NGRAM: usize = 4;

pub(crate) fn comparator_word(token: &str) -> Option<Comparator> {
    Some(match token {
        "more" | "greater" | "over" | "above" | "higher" | "exceeding" | "exceeds" | "exceed" => Comparator::Gt,
        "less" | "fewer" | "under" | "below" | "lower" => Comparator::Lt,
        "least" => Comparator::Ge,
        "most" => Comparator::Le,
        "equal" | "equals" | "exactly" => Comparator::Eq,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Function {
    Number(f64),
    Compare(Comparator),
    Between,
    Not,
    Here,
    These,
}

fn function_token(token: &str) -> Option<Function> {
    if let Some(n) = as_number(token) {
        return Some(Function::Number(n));
    }
    if let Some(c) = comparator_word(token) {
        return Some(Function::Compare(c));
    }
    Some(match token {
        "between" => Function::Between,
        "not" | "except" | "excluding" | "but" => Function::Not,
        "here" | "there" => Function::Here,
        "these" | "those" | "them" | "this" | "they" => Function::These,
        _ => return None,
    })
}

#[derive(Debug, Clone)]
struct Mention {
    start: usize,
    end: usize,
    referent: Referent,
    score: f64,
    rivals: Vec<Candidate>,
    text: String,
}

fn kind_of(r: &Referent) -> u8 {
    match r {
        Referent::Attribute { .. } => 0,
        Referent::AttributeValue { .. } => 1,
        Referent::OperationKeyword { .. } => 2,
        Referent::ColorName { .. } => 3,
        Referent::CanvasRegion { .. } => 4,
        Referent::Tag { .. } => 5,
    }
}

/// Best-scoring referents for one n-gram, deduplicated by referent, in
/// score order (ties by lexicon order).
fn candidates(query: &Features, grammar: &Grammar) -> Vec<Candidate> {
    let mut out: Vec<(usize, Candidate)> = Vec::new();
    for (i, (entry, feat)) in grammar.lexicon.iter().zip(&grammar.features).enumerate() {
        let partial_ok = matches!(
            entry.referent,
            Referent::Attribute { .. } | Referent::AttributeValue { .. }
        );
        let s = similarity::score(query, feat, partial_ok);
        if s < THRESHOLD {
            continue;
        }
        match out.iter_mut().find(|(_, c)| c.referent == entry.referent) {
            Some((_, c)) => c.score = c.score.max(s),
            None => out.push((
                i,
                Candidate {
                    referent: entry.referent.clone(),
                    score: s,
                },
            )),
        }
    }
    out.sort_by(|(ia, a), (ib, b)| b.score.total_cmp(&a.score).then(ia.cmp(ib)));
    out.into_iter().map(|(_, c)| c).collect()
}

/// Scores all n-grams (n = 1..4, never spanning a function token) and
/// assembles the greedy non-overlapping best matches into an
/// interpretation. `None` when nothing meaningful was recognized.
pub fn ngram_match(tokens: &[String], grammar: &Grammar) -> Option<Interpretation> {
    let tokens: Vec<String> = tokens.iter().filter(|t| !is_stopword(t)).cloned().collect();
    let canon: Vec<String> = tokens.iter().map(|t| canonical(t)).collect();
    let functions: Vec<Option<Function>> = tokens.iter().map(|t| function_token(t)).collect();

    let mut scored: Vec<Mention> = Vec::new();
    for start in 0..tokens.len() {
        for n in 1..=MAX_NGRAM {
            let end = start + n;
            if end > tokens.len() || functions[start..end].iter().any(Option::is_some) {
                break;
            }
            let key: Vec<String> = canon[start..end].iter().filter(|t| !is_item_noun(t)).cloned().collect();
            if key.is_empty() {
                continue;
            }
            let cands = candidates(&Features::new(&key), grammar);
            let Some(best) = cands.first().cloned() else {
                continue;
            };
            let rivals: Vec<Candidate> = cands
                .into_iter()
                .filter(|c| kind_of(&c.referent) == kind_of(&best.referent))
                .filter(|c| best.score - c.score < AMBIGUITY_MARGIN)
                .collect();
            scored.push(Mention {
                start,
                end,
                referent: best.referent,
                score: best.score,
                rivals,
                text: tokens[start..end].join(" "),
            });
        }
    }
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then((b.end - b.start).cmp(&(a.end - a.start)))
            .then(a.start.cmp(&b.start))
    });
    let mut taken = vec![false; tokens.len()];
    let mut mentions: Vec<Mention> = Vec::new();
    for m in scored {
        if taken[m.start..m.end].iter().any(|t| *t) {
            continue;
        }
        taken[m.start..m.end].iter_mut().for_each(|t| *t = true);
        mentions.push(m);
    }
    mentions.sort_by_key(|m| m.start);
    Assembler::new(grammar, &tokens, &functions, mentions, taken).run()
}

struct Atom {
    pos: usize,
    negated: bool,
    kind: AtomKind,
}

enum AtomKind {
    Value { attribute: String, value: String },
    Compare(Predicate),
    Color(NamedColor),
    Flag(VisualFlag),
}

struct Assembler<'a> {
    grammar: &'a Grammar,
    tokens: &'a [String],
    functions: &'a [Option<Function>],
    mentions: Vec<Mention>,
    taken: Vec<bool>,
}

impl<'a> Assembler<'a> {
    fn new(
        grammar: &'a Grammar,
        tokens: &'a [String],
        functions: &'a [Option<Function>],
        mentions: Vec<Mention>,
        taken: Vec<bool>,
    ) -> Self {
        Self {
            grammar,
            tokens,
            functions,
            mentions,
            taken,
        }
    }

    fn run(self) -> Option<Interpretation> {
        let mut classes: Vec<(usize, OperationClass)> = Vec::new();
        let mut directions = Vec::new();
        let mut clears = Vec::new();
        let mut flags: Vec<(usize, VisualFlag)> = Vec::new();
        let mut repeat = false;
        let mut attrs: Vec<usize> = Vec::new();
        let mut values: Vec<usize> = Vec::new();
        let mut colors: Vec<(usize, NamedColor)> = Vec::new();
        let mut regions: Vec<RegionKeyword> = Vec::new();
        let mut tags: Vec<(usize, String)> = Vec::new();
        for (i, m) in self.mentions.iter().enumerate() {
            match &m.referent {
                Referent::OperationKeyword { keyword } => match keyword {
                    Keyword::Operation(c) => classes.push((m.start, *c)),
                    Keyword::Direction(d) => directions.push(*d),
                    Keyword::Clear(c) => clears.push(*c),
                    Keyword::Visual(v) => flags.push((m.start, *v)),
                    Keyword::Repeat => repeat = true,
                },
                Referent::Attribute { .. } => attrs.push(i),
                Referent::AttributeValue { .. } => values.push(i),
                Referent::ColorName { color } => colors.push((m.start, *color)),
                Referent::CanvasRegion { region } => regions.push(*region),
                Referent::Tag { tag } => tags.push((m.start, tag.clone())),
            }
        }

        let mut numbers: Vec<(usize, f64, bool)> = Vec::new();
        let mut comparators: Vec<(usize, Option<Comparator>)> = Vec::new();
        let mut negations = Vec::new();
        let mut here = false;
        let mut these = false;
        for (pos, f) in self.functions.iter().enumerate() {
            match f {
                Some(Function::Number(n)) => numbers.push((pos, *n, false)),
                Some(Function::Compare(c)) => comparators.push((pos, Some(*c))),
                Some(Function::Between) => comparators.push((pos, None)),
                Some(Function::Not) => negations.push(pos),
                Some(Function::Here) => here = true,
                Some(Function::These) => these = true,
                None => {}
            }
        }

        // comparator chains bind to the nearest quantitative attribute mention
        let mut atoms: Vec<Atom> = Vec::new();
        let mut bound_attrs: BTreeSet<usize> = BTreeSet::new();
        for (pos, cmp) in &comparators {
            let wanted = if cmp.is_some() { 1 } else { 2 };
            let picked: Vec<usize> = numbers
                .iter()
                .enumerate()
                .filter(|(_, (p, _, used))| *p > *pos && !used)
                .take(wanted)
                .map(|(i, _)| i)
                .collect();
            if picked.len() < wanted {
                continue;
            }
            let Some(ai) = self.nearest_quantitative(&attrs, *pos) else {
                continue;
            };
            let attribute = self.attr_name(ai);
            for &i in &picked {
                numbers[i].2 = true;
            }
            let preds: Vec<Predicate> = match cmp {
                Some(c) => vec![Predicate::Compare {
                    attribute: attribute.clone(),
                    comparator: *c,
                    value: numbers[picked[0]].1,
                }],
                None => {
                    let (a, b) = (numbers[picked[0]].1, numbers[picked[1]].1);
                    vec![
                        Predicate::Compare {
                            attribute: attribute.clone(),
                            comparator: Comparator::Ge,
                            value: a.min(b),
                        },
                        Predicate::Compare {
                            attribute: attribute.clone(),
                            comparator: Comparator::Le,
                            value: a.max(b),
                        },
                    ]
                }
            };
            bound_attrs.insert(ai);
            atoms.push(Atom {
                pos: *pos,
                negated: false,
                kind: AtomKind::Compare(Predicate::and(preds)),
            });
        }

        let free_attrs: Vec<usize> = attrs.iter().copied().filter(|i| !bound_attrs.contains(i)).collect();
        let has_attr = !free_attrs.is_empty();
        let spare_number = numbers.iter().find(|n| !n.2).map(|n| n.1);
        let destination = if here {
            Some(Destination::Here)
        } else {
            regions.first().map(|r| Destination::Region { region: *r })
        };

        // operation inference
        let first_class = |wanted: &[OperationClass]| classes.iter().find(|(_, c)| wanted.contains(c)).copied();
        let mut filter_mode = None;
        let mut clear = None;
        let operation = if first_class(&[OperationClass::Undo]).is_some() {
            Some(OperationKind::Undo)
        } else if first_class(&[OperationClass::Clear]).is_some() {
            clear = clears.first().copied().or_else(|| {
                classes.iter().find_map(|(_, c)| match c {
                    OperationClass::Label => Some(ClearTarget::Labels),
                    OperationClass::Color => Some(ClearTarget::Colors),
                    OperationClass::Size => Some(ClearTarget::Sizes),
                    OperationClass::Tag => Some(ClearTarget::Tags),
                    OperationClass::Axis => Some(ClearTarget::Axes),
                    OperationClass::Highlight => Some(ClearTarget::Selection),
                    _ => None,
                })
            });
            if clear.is_none() && flags.iter().any(|(_, f)| *f == VisualFlag::Selected) {
                clear = Some(ClearTarget::Selection);
            }
            Some(OperationKind::Clear)
        } else if first_class(&[OperationClass::Restore]).is_some() {
            Some(OperationKind::Restore)
        } else if first_class(&[OperationClass::Axis]).is_some()
            || (first_class(&[OperationClass::Order]).is_some() && !directions.is_empty())
        {
            Some(OperationKind::AssignAxis)
        } else if let Some((_, class)) = classes.first() {
            Some(match class {
                OperationClass::Order => OperationKind::OrderBy,
                OperationClass::Color => {
                    if !has_attr && !colors.is_empty() {
                        OperationKind::ColorExplicit
                    } else {
                        OperationKind::ColorBy
                    }
                }
                OperationClass::Size => {
                    if !has_attr && spare_number.is_some() {
                        OperationKind::SizeExplicit
                    } else {
                        OperationKind::SizeBy
                    }
                }
                OperationClass::Filter => {
                    filter_mode = Some(FilterMode::Remove);
                    OperationKind::Filter
                }
                OperationClass::Keep => {
                    filter_mode = Some(FilterMode::KeepOnly);
                    OperationKind::Filter
                }
                OperationClass::Move => OperationKind::Move,
                OperationClass::Highlight => OperationKind::Highlight,
                OperationClass::Label => OperationKind::Label,
                OperationClass::Summarize => OperationKind::Summarize,
                OperationClass::Tag => OperationKind::Tag,
                // handled above
                OperationClass::Undo | OperationClass::Clear | OperationClass::Restore | OperationClass::Axis => {
                    unreachable!("dispatched earlier")
                }
            })
        } else if destination.is_some() && !repeat {
            Some(OperationKind::Move)
        } else {
            None
        };
        if operation == Some(OperationKind::Undo) {
            repeat = false;
        }

        // colors: the last one is the parameter of an explicit coloring,
        // every other color describes targets
        let mut param_color = None;
        if operation == Some(OperationKind::ColorExplicit) {
            param_color = colors.pop().map(|(_, c)| c);
        }
        for (pos, c) in &colors {
            atoms.push(Atom {
                pos: *pos,
                negated: false,
                kind: AtomKind::Color(*c),
            });
        }
        for &i in &values {
            if let Referent::AttributeValue { attribute, value } = &self.mentions[i].referent {
                atoms.push(Atom {
                    pos: self.mentions[i].start,
                    negated: false,
                    kind: AtomKind::Value {
                        attribute: attribute.clone(),
                        value: value.clone(),
                    },
                });
            }
        }
        for (pos, f) in &flags {
            if *f != VisualFlag::Selected || operation != Some(OperationKind::Clear) {
                atoms.push(Atom {
                    pos: *pos,
                    negated: false,
                    kind: AtomKind::Flag(*f),
                });
            }
        }
        atoms.sort_by_key(|a| a.pos);
        for n in &negations {
            if let Some(a) = atoms.iter_mut().find(|a| a.pos > *n) {
                a.negated = true;
            }
        }

        let mut tag_param = None;
        if operation == Some(OperationKind::Tag) {
            let kw = first_class(&[OperationClass::Tag]).map(|(p, _)| p).unwrap_or(0);
            tag_param = tags
                .iter()
                .find(|(p, _)| *p > kw)
                .map(|(_, t)| t.clone())
                .or_else(|| self.free_word_after(kw));
            tags.retain(|(_, t)| Some(t) != tag_param.as_ref());
        }

        let target = self.build_target(atoms, these, &tags);
        let attribute = match operation {
            None => free_attrs.first().map(|i| self.attr_name(*i)),
            Some(op) if op.takes_attribute() => free_attrs.first().map(|i| self.attr_name(*i)),
            _ => None,
        };
        let size = match operation {
            Some(OperationKind::SizeExplicit) => spare_number,
            _ => None,
        };
        let direction = match operation {
            Some(OperationKind::AssignAxis) | None => directions.first().copied(),
            _ => None,
        };

        let recognized =
            operation.is_some() || repeat || attribute.is_some() || target.is_some() || destination.is_some();
        if !recognized {
            return None;
        }

        let mut ambiguities = Vec::new();
        for i in free_attrs.iter().take(1).chain(values.iter()) {
            let m = &self.mentions[*i];
            if m.rivals.len() > 1 {
                ambiguities.push(Ambiguity {
                    slot: if values.contains(i) {
                        Slot::Value
                    } else {
                        Slot::Attribute
                    },
                    candidates: m.rivals.clone(),
                });
            }
        }

        let confidence = if self.mentions.is_empty() {
            0.5
        } else {
            self.mentions.iter().map(|m| m.score).sum::<f64>() / self.mentions.len() as f64
        };
        let params = super::Params {
            attribute,
            direction,
            color: param_color,
            destination: match operation {
                Some(OperationKind::Move) | None => destination,
                _ => None,
            },
            size,
            filter_mode,
            tag: tag_param,
            clear,
        };
        Some(Interpretation {
            operation,
            params,
            target,
            ambiguities,
            confidence,
            source_span: self.mentions.iter().map(|m| m.text.clone()).collect(),
            repeat: repeat && operation.is_none(),
        })
    }

    fn attr_name(&self, mention: usize) -> String {
        match &self.mentions[mention].referent {
            Referent::Attribute { attribute } => attribute.clone(),
            _ => unreachable!("attribute mention"),
        }
    }

    /// Nearest quantitative attribute by token distance; ties go to the
    /// mention before the comparator.
    fn nearest_quantitative(&self, attrs: &[usize], pos: usize) -> Option<usize> {
        attrs
            .iter()
            .copied()
            .filter(|i| self.grammar.is_quantitative(&self.attr_name(*i)))
            .min_by_key(|i| {
                let m = &self.mentions[*i];
                if m.end <= pos {
                    (pos - m.end + 1, 0)
                } else {
                    (m.start - pos, 1)
                }
            })
    }

    /// First token after `pos` that no match or function word claimed.
    fn free_word_after(&self, pos: usize) -> Option<String> {
        (pos + 1..self.tokens.len())
            .find(|&i| !self.taken[i] && self.functions[i].is_none() && !is_item_noun(&canonical(&self.tokens[i])))
            .map(|i| self.tokens[i].clone())
    }

    fn build_target(&self, atoms: Vec<Atom>, these: bool, tags: &[(usize, String)]) -> Option<TargetSpec> {
        // same-attribute values are alternatives, different attributes conjoin
        let mut groups: Vec<(String, bool, Predicate)> = Vec::new();
        let mut parts: Vec<Predicate> = Vec::new();
        let mut colors: Option<(bool, Vec<NamedColor>)> = None;
        for atom in atoms {
            match atom.kind {
                AtomKind::Value { attribute, value } => match groups.iter_mut().find(|(a, _, _)| *a == attribute) {
                    Some((_, neg, Predicate::ValueIn { values, .. })) => {
                        if !values.contains(&value) {
                            values.push(value);
                        }
                        *neg |= atom.negated;
                    }
                    _ => groups.push((
                        attribute.clone(),
                        atom.negated,
                        Predicate::ValueIn {
                            attribute,
                            values: vec![value],
                        },
                    )),
                },
                AtomKind::Color(c) => match &mut colors {
                    Some((neg, cs)) => {
                        cs.push(c);
                        *neg |= atom.negated;
                    }
                    None => colors = Some((atom.negated, vec![c])),
                },
                AtomKind::Compare(p) => parts.push(if atom.negated { p.negate() } else { p }),
                AtomKind::Flag(f) => {
                    let p = Predicate::Flag { flag: f };
                    parts.push(if atom.negated { p.negate() } else { p });
                }
            }
        }
        let mut all: Vec<Predicate> = groups
            .into_iter()
            .map(|(_, neg, p)| if neg { p.negate() } else { p })
            .collect();
        if let Some((neg, cs)) = colors {
            let p = Predicate::ColorIs { colors: cs };
            all.push(if neg { p.negate() } else { p });
        }
        all.extend(parts);
        if all.is_empty() {
            if these {
                return Some(TargetSpec::Selection);
            }
            return tags.first().map(|(_, t)| TargetSpec::Tag { tag: t.clone() });
        }
        if these {
            all.push(Predicate::Flag {
                flag: VisualFlag::Selected,
            });
        }
        Some(TargetSpec::Where {
            predicate: Predicate::and(all),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_words() {
        assert_eq!(function_token("30000"), Some(Function::Number(30000.0)));
        assert_eq!(function_token("more"), Some(Function::Compare(Comparator::Gt)));
        assert_eq!(function_token("except"), Some(Function::Not));
        assert_eq!(function_token("here"), Some(Function::Here));
        assert_eq!(function_token("region"), None);
    }
}

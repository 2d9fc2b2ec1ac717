//! Tokenization and word normalization shared by the lexicon and the parser.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::Deserialize;

const STOPWORDS: &str = include_str!("resources/stopwords.txt");
const SYNONYMS: &str = include_str!("resources/synonyms.json");

#[derive(Debug, Deserialize)]
struct SynonymTable {
    #[allow(dead_code)]
    version: u32,
    synonyms: HashMap<String, String>,
    item_nouns: Vec<String>,
}

struct Tables {
    stopwords: HashSet<String>,
    synonyms: HashMap<String, String>,
    item_nouns: HashSet<String>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let stopwords = STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        let table: SynonymTable = serde_json::from_str(SYNONYMS).expect("bundled synonym table is valid JSON");
        Tables {
            stopwords,
            synonyms: table.synonyms.into_iter().map(|(k, v)| (stem(&k), stem(&v))).collect(),
            item_nouns: table.item_nouns.into_iter().collect(),
        }
    })
}

pub fn is_stopword(token: &str) -> bool {
    tables().stopwords.contains(token)
}

/// Nouns that name the data items themselves ("schools", "points").
pub fn is_item_noun(canonical_token: &str) -> bool {
    tables().item_nouns.contains(canonical_token)
}

/// Lowercases, strips punctuation and normalizes number literals
/// ("30,000" and "30k" both become "30000"). Stopwords are kept.
pub fn tokenize(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in raw.split_whitespace() {
        let trimmed = word.trim_matches(|c: char| !c.is_alphanumeric() && c != '$');
        if let Some(n) = parse_number_literal(trimmed) {
            out.push(format_number(n));
            continue;
        }
        let lower = trimmed.to_lowercase();
        out.extend(
            lower
                .split(|c: char| !c.is_alphanumeric())
                .filter(|s| !s.is_empty())
                .map(str::to_string),
        );
    }
    out
}

/// Tokenizes and drops stopwords.
pub fn normalize(raw: &str) -> Vec<String> {
    tokenize(raw).into_iter().filter(|t| !is_stopword(t)).collect()
}

fn parse_number_literal(word: &str) -> Option<f64> {
    let w = word.trim_start_matches('$').trim_end_matches('%');
    if w.is_empty() || !w.chars().next()?.is_ascii_digit() {
        return None;
    }
    let (body, mult) = match w.strip_suffix(['k', 'K']) {
        Some(b) => (b, 1000.0),
        None => (w, 1.0),
    };
    crate::dataset::parse_number(body).map(|v| v * mult)
}

pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

pub fn as_number(token: &str) -> Option<f64> {
    if token.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') {
        token.parse().ok()
    } else {
        None
    }
}

/// Plural stripping, enough to fold "cities"/"city" and "schools"/"school".
pub fn stem(token: &str) -> String {
    let t = token;
    if t.len() <= 3 || as_number(t).is_some() {
        return t.to_string();
    }
    if let Some(b) = t.strip_suffix("ies") {
        return format!("{b}y");
    }
    if let Some(b) = t.strip_suffix("sses") {
        return format!("{b}ss");
    }
    for suffix in ["ches", "shes", "xes"] {
        if t.ends_with(suffix) {
            return t[..t.len() - 2].to_string();
        }
    }
    if t.ends_with('s') && !t.ends_with("ss") && !t.ends_with("us") && !t.ends_with("is") {
        return t[..t.len() - 1].to_string();
    }
    t.to_string()
}

/// Stem, then fold through the synonym table.
pub fn canonical(token: &str) -> String {
    let s = stem(token);
    match tables().synonyms.get(&s) {
        Some(c) => c.clone(),
        None => s,
    }
}

/// Matching key for a lexicon phrase: normalized, canonicalized tokens with
/// item nouns removed (unless that would leave nothing).
pub fn phrase_key(phrase: &str) -> Vec<String> {
    let canon: Vec<String> = normalize(phrase).iter().map(|t| canonical(t)).collect();
    let content: Vec<String> = canon.iter().filter(|t| !is_item_noun(t)).cloned().collect();
    if content.is_empty() {
        canon
    } else {
        content
    }
}

/// Lowercase, whitespace-collapsed display form.
pub fn clean_phrase(phrase: &str) -> String {
    phrase.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

//! Phrase similarity: exact key match, character-trigram Jaccard, token
//! cosine, and a word-containment score for partial attribute names.

use std::collections::{BTreeMap, BTreeSet};

/// Minimum score for an n-gram to be accepted as a referent.
pub const THRESHOLD: f64 = 0.75;
/// Top-two candidates closer than this are reported as ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 0.05;

/// Precomputed features of a canonical token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    pub key: Vec<String>,
    trigrams: Vec<u64>,
    tf: BTreeMap<String, f64>,
}

impl Features {
    pub fn new(key: &[String]) -> Features {
        let joined = key.join(" ");
        let mut tf = BTreeMap::new();
        for t in key {
            *tf.entry(t.clone()).or_insert(0.0) += 1.0;
        }
        Features {
            key: key.to_vec(),
            trigrams: hashed(&trigrams(&joined)),
            tf,
        }
    }
}

/// Character trigrams; strings shorter than three characters yield themselves.
pub fn trigrams(s: &str) -> BTreeSet<String> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() < 3 {
        return std::iter::once(s.to_string()).filter(|s| !s.is_empty()).collect();
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Sorted trigram fingerprints for fast set intersection.
fn hashed(grams: &BTreeSet<String>) -> Vec<u64> {
    use std::hash::{Hash, Hasher};
    let mut out: Vec<u64> = grams
        .iter()
        .map(|g| {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            g.hash(&mut h);
            h.finish()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn sorted_jaccard(a: &[u64], b: &[u64]) -> f64 {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

pub fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Score for a query whose every word occurs in a longer phrase ("debt" in
/// "median debt"): `0.75 + 0.1 * covered fraction`, so it clears the
/// threshold but never beats an exact match.
pub fn containment(query: &[String], phrase: &[String]) -> f64 {
    if query.is_empty() || query.len() >= phrase.len() {
        return 0.0;
    }
    if query.iter().all(|q| phrase.contains(q)) {
        THRESHOLD + 0.1 * query.len() as f64 / phrase.len() as f64
    } else {
        0.0
    }
}

/// Composite score in `[0, 1]`. `allow_containment` is set for attribute and
/// attribute-value phrases only.
pub fn score(query: &Features, entry: &Features, allow_containment: bool) -> f64 {
    if query.key == entry.key {
        return 1.0;
    }
    let mut s = sorted_jaccard(&query.trigrams, &entry.trigrams).max(cosine(&query.tf, &entry.tf));
    if allow_containment {
        s = s.max(containment(&query.key, &entry.key));
    }
    s.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(words: &[&str]) -> Features {
        Features::new(&words.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    #[test]
    fn exact_is_one() {
        assert_eq!(score(&f(&["average", "cost"]), &f(&["average", "cost"]), true), 1.0);
    }

    #[test]
    fn trigram_jaccard_by_hand() {
        // reg egi gio ion / reg egi gio ion ona nal all lly
        let a = trigrams("region");
        let b = trigrams("regionally");
        assert_eq!(a.len(), 4);
        assert_eq!(b.len(), 8);
        assert_eq!(jaccard(&a, &b), 0.5);
        assert!(score(&f(&["regionally"]), &f(&["region"]), true) < THRESHOLD);
    }

    #[test]
    fn cosine_by_hand() {
        let s = cosine(&f(&["a", "b"]).tf, &f(&["a"]).tf);
        assert!((s - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn containment_prefers_shorter_phrases() {
        let debt = f(&["debt"]);
        assert_eq!(score(&debt, &f(&["median", "debt"]), true), 0.8);
        assert!(score(&debt, &f(&["median", "debt"]), false) < THRESHOLD);
        let three = score(&debt, &f(&["total", "median", "debt"]), true);
        assert!((THRESHOLD..0.8).contains(&three));
    }

    #[test]
    fn unrelated_words_score_low() {
        for (a, b) in [("legion", "region"), ("shelter", "summarize"), ("apply", "label")] {
            assert!(score(&f(&[a]), &f(&[b]), true) < THRESHOLD, "{a} {b}");
        }
    }
}

//! Query and title normalization: tokenize, lowercase, stem or lemmatize,
//! drop stop words, dedupe.
//!
//! Stop words are removed by their processed form, so a keyword is dropped
//! in every mode exactly when its normalized key collides with a stop key.
//! Lemma keys are a coarsening of stem keys and stem keys a coarsening of
//! raw tokens, which keeps retrieval monotone across modes.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::porter;

const STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const LEMMAS: &str = include_str!("../../data/lemmas.txt");
const FIXPOINT_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordMode {
    None,
    Stem,
    #[default]
    Lemma,
}

impl KeywordMode {
    pub const ALL: [KeywordMode; 3] = [KeywordMode::None, KeywordMode::Stem, KeywordMode::Lemma];

    pub fn as_str(self) -> &'static str {
        match self {
            KeywordMode::None => "none",
            KeywordMode::Stem => "stem",
            KeywordMode::Lemma => "lemma",
        }
    }
}

impl std::str::FromStr for KeywordMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(KeywordMode::None),
            "stem" => Ok(KeywordMode::Stem),
            "lemma" => Ok(KeywordMode::Lemma),
            other => Err(format!("unknown keyword mode {other:?} (expected none, stem or lemma)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keyword {
    pub surface: String,
    pub processed: String,
}

struct Tables {
    stop: HashSet<String>,
    stop_stem: HashSet<String>,
    stop_lemma: HashSet<String>,
    /// stem key -> lemma key
    merge: HashMap<String, String>,
}

fn lines(data: &str) -> impl Iterator<Item = &str> {
    data.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Porter stem iterated to a fixed point.
pub fn stem_key(word: &str) -> String {
    let mut cur = porter::stem(word);
    for _ in 0..FIXPOINT_CAP {
        let next = porter::stem(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let stop: HashSet<String> = lines(STOPWORDS).map(str::to_lowercase).collect();
        let mut merge: HashMap<String, String> = HashMap::new();
        for line in lines(LEMMAS) {
            let mut parts = line.split_whitespace();
            let (Some(surface), Some(base)) = (parts.next(), parts.next()) else {
                continue;
            };
            let (from, to) = (stem_key(surface), stem_key(base));
            if from != to {
                merge.entry(from).or_insert(to);
            }
        }
        // resolve chains so every target maps to itself
        let keys: Vec<String> = merge.keys().cloned().collect();
        for k in keys {
            let mut seen = HashSet::from([k.clone()]);
            let mut target = merge[&k].clone();
            while let Some(next) = merge.get(&target) {
                if !seen.insert(target.clone()) {
                    break;
                }
                target = next.clone();
            }
            merge.insert(k, target);
        }
        merge.retain(|k, v| k != v);
        let stop_stem: HashSet<String> = stop.iter().map(|w| stem_key(w)).chain(stop.iter().cloned()).collect();
        let stop_lemma: HashSet<String> = stop_stem
            .iter()
            .map(|s| merge.get(s).unwrap_or(s).clone())
            .chain(stop.iter().cloned())
            .collect();
        Tables {
            stop,
            stop_stem,
            stop_lemma,
            merge,
        }
    })
}

pub fn is_stop_word(word: &str) -> bool {
    tables().stop.contains(&word.to_lowercase())
}

/// Splits on anything that is not a letter, digit or inner apostrophe.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|t| t.trim_matches('\''))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn normalize(token: &str, mode: KeywordMode) -> String {
    match mode {
        KeywordMode::None => token.to_lowercase(),
        KeywordMode::Stem => stem_key(token),
        KeywordMode::Lemma => {
            let s = stem_key(token);
            tables().merge.get(&s).cloned().unwrap_or(s)
        }
    }
}

fn is_stop_key(key: &str, mode: KeywordMode) -> bool {
    let t = tables();
    match mode {
        KeywordMode::None => t.stop.contains(key),
        KeywordMode::Stem => t.stop_stem.contains(key),
        KeywordMode::Lemma => t.stop_lemma.contains(key),
    }
}

pub fn process_keywords(text: &str, mode: KeywordMode, omit_stop: bool) -> Vec<Keyword> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for surface in tokenize(text) {
        let processed = normalize(&surface, mode);
        if omit_stop && is_stop_key(&processed, mode) {
            continue;
        }
        if seen.insert(processed.clone()) {
            out.push(Keyword { surface, processed });
        }
    }
    out
}

/// Processed forms only.
pub fn keys(text: &str, mode: KeywordMode, omit_stop: bool) -> Vec<String> {
    process_keywords(text, mode, omit_stop).into_iter().map(|k| k.processed).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_table_targets_are_fixed_points() {
        for (k, v) in &tables().merge {
            assert!(!tables().merge.contains_key(v), "{k} -> {v} is not resolved");
            assert_eq!(&stem_key(v), v);
        }
    }

    #[test]
    fn irregular_forms_share_a_key() {
        assert_eq!(normalize("children", KeywordMode::Lemma), normalize("child", KeywordMode::Lemma));
        assert_eq!(normalize("wrote", KeywordMode::Lemma), normalize("writing", KeywordMode::Lemma));
        assert_ne!(normalize("wrote", KeywordMode::Stem), normalize("writing", KeywordMode::Stem));
    }

    #[test]
    fn tokenizer_keeps_inner_apostrophes() {
        assert_eq!(tokenize("Don't 'quote' C++ x2"), vec!["don't", "quote", "c", "x2"]);
    }
}

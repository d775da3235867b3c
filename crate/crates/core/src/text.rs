//! Lemmatization and term-frequency profiles of item descriptions.
//!
//! The lemmatizer is rule based: case-fold, split on non-letters, drop
//! one-letter tokens and stopwords, then map each token through an exception
//! table or a short list of suffix rules applied until nothing changes. The
//! output is therefore a fixed point: lemmatizing a lemma returns it
//! unchanged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

const STOPWORDS_TXT: &str = include_str!("../data/stopwords.txt");

static STOPWORDS: LazyLock<BTreeSet<&'static str>> = LazyLock::new(|| {
    STOPWORDS_TXT
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
});

static STOPWORDS_HASH: LazyLock<String> =
    LazyLock::new(|| hex::encode(Sha256::digest(STOPWORDS_TXT.as_bytes())));

/// Irregular forms and words the suffix rules would mangle.
const EXCEPTIONS: &[(&str, &str)] = &[
    // trigger words and their inflections
    ("molestation", "molestation"),
    ("molestations", "molestation"),
    ("weapon", "weapon"),
    ("weapons", "weapon"),
    ("brutality", "brutality"),
    ("brutalities", "brutality"),
    ("violently", "violently"),
    ("surprise", "surprise"),
    ("surprises", "surprise"),
    ("surprised", "surprise"),
    ("surprising", "surprise"),
    ("torture", "torture"),
    ("tortures", "torture"),
    ("tortured", "torture"),
    ("torturing", "torture"),
    ("kill", "kill"),
    ("kills", "kill"),
    ("killed", "kill"),
    ("killing", "kill"),
    // irregular plurals
    ("men", "man"),
    ("women", "woman"),
    ("children", "child"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("mice", "mouse"),
    ("geese", "goose"),
    ("series", "series"),
    ("species", "species"),
    ("news", "news"),
    // irregular verbs
    ("led", "lead"),
    ("fled", "flee"),
    ("built", "build"),
    ("fought", "fight"),
    ("taken", "take"),
    ("took", "take"),
    ("made", "make"),
    ("went", "go"),
    ("gone", "go"),
    ("came", "come"),
    ("began", "begin"),
    ("begun", "begin"),
    ("wrote", "write"),
    ("written", "write"),
    ("dies", "die"),
    ("died", "die"),
    ("dying", "die"),
    ("lies", "lie"),
    ("ties", "tie"),
    ("added", "add"),
    ("embedded", "embed"),
    ("embed", "embed"),
    // adjectives and nouns that look inflected
    ("sacred", "sacred"),
    ("wicked", "wicked"),
    ("naked", "naked"),
    ("beloved", "beloved"),
    ("hatred", "hatred"),
    ("hundred", "hundred"),
    ("morning", "morning"),
    ("evening", "evening"),
    ("ceiling", "ceiling"),
    ("anything", "anything"),
    ("something", "something"),
    ("nothing", "nothing"),
    ("everything", "everything"),
    ("during", "during"),
    ("sickening", "sickening"),
];

/// Stems that get their final "e" back once "-ing" or "-ed" is removed.
const E_RESTORE: &[&str] = &[
    "abus", "accus", "achiev", "acquir", "ador", "amus", "argu", "arrang", "believ", "captur",
    "carv", "caus", "celebrat", "chang", "clos", "combin", "compar", "compos", "confus",
    "continu", "creat", "damag", "dat", "decid", "declar", "decorat", "defin", "describ",
    "desecrat", "determin", "dispos", "emerg", "enforc", "engrav", "escap", "examin", "excus",
    "expos", "forc", "giv", "hous", "imagin", "impos", "increas", "inspir", "introduc", "involv",
    "issu", "liv", "locat", "lov", "mak", "manag", "mov", "oppos", "plac", "pleas", "prais",
    "prepar", "produc", "propos", "prov", "purchas", "pursu", "rais", "receiv", "reduc", "refus",
    "relat", "releas", "requir", "rescu", "retir", "revers", "rul", "sacrific", "sav", "serv",
    "shap", "shar", "stor", "suppos", "surpris", "tak", "tortur", "us", "valu", "writ",
];

static EXCEPTION_MAP: LazyLock<HashMap<&'static str, &'static str>> =
    LazyLock::new(|| EXCEPTIONS.iter().copied().collect());

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("empty profile: no content terms in the description of {0:?}")]
    EmptyProfile(String),
}

/// Content hash of the bundled stopword list.
pub fn stopwords_hash() -> &'static str {
    &STOPWORDS_HASH
}

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(word)
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

fn strip_verbal(stem: &str) -> Option<String> {
    if E_RESTORE.contains(&stem) {
        return Some(format!("{stem}e"));
    }
    if stem.chars().count() < 3 || !has_vowel(stem) {
        return None;
    }
    let mut chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    // running -> run, stopped -> stop; keep kill, pass, buzz
    if chars[n - 1] == chars[n - 2] && !"aeiouylsz".contains(chars[n - 1]) {
        chars.pop();
    }
    Some(chars.into_iter().collect())
}

fn apply_rule(word: &str) -> Option<String> {
    let len = word.chars().count();
    if let Some(stem) = word.strip_suffix("ies") {
        if len > 4 {
            return Some(format!("{stem}y"));
        }
    }
    if let Some(stem) = word.strip_suffix("sses") {
        return Some(format!("{stem}ss"));
    }
    if let Some(stem) = word.strip_suffix('s') {
        if !(word.ends_with("ss") || word.ends_with("us") || word.ends_with("is")) && len > 3 {
            return Some(stem.to_string());
        }
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if let Some(out) = strip_verbal(stem) {
            return Some(out);
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if let Some(out) = strip_verbal(stem) {
            return Some(out);
        }
    }
    None
}

/// Lemma of a single lowercase word.
pub fn lemma_of(word: &str) -> String {
    let mut current = word.to_string();
    loop {
        if let Some(lemma) = EXCEPTION_MAP.get(current.as_str()) {
            return (*lemma).to_string();
        }
        match apply_rule(&current) {
            Some(next) if next != current => current = next,
            _ => return current,
        }
    }
}

/// A surviving token with its byte range in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub lemma: String,
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// Lemmatized content tokens of `text`, with their source spans.
pub fn tokens(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start = None;
    let push = |s: usize, e: usize, out: &mut Vec<Token>| {
        let surface = &text[s..e];
        let folded = surface.to_lowercase();
        if folded.chars().count() < 2 || is_stopword(&folded) {
            return;
        }
        let lemma = lemma_of(&folded);
        if lemma.chars().count() < 2 || is_stopword(&lemma) {
            return;
        }
        out.push(Token { lemma, surface: surface.to_string(), start: s, end: e });
    };
    for (i, c) in text.char_indices() {
        match (c.is_alphabetic(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                push(s, i, &mut out);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        push(s, text.len(), &mut out);
    }
    out
}

pub fn lemmatize(text: &str) -> Vec<String> {
    tokens(text).into_iter().map(|t| t.lemma).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CulturalItem {
    pub id: String,
    pub title: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureProfile {
    pub item_id: String,
    /// Relative frequency of each lemma; sums to 1.
    pub frequencies: BTreeMap<String, f64>,
    pub token_count: usize,
}

impl FeatureProfile {
    pub fn from_lemmas(item_id: impl Into<String>, lemmas: &[String]) -> Result<Self, TextError> {
        let item_id = item_id.into();
        if lemmas.is_empty() {
            return Err(TextError::EmptyProfile(item_id));
        }
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for l in lemmas {
            *counts.entry(l.clone()).or_default() += 1;
        }
        let total = lemmas.len();
        let frequencies = counts
            .into_iter()
            .map(|(t, c)| (t, c as f64 / total as f64))
            .collect();
        Ok(Self { item_id, frequencies, token_count: total })
    }

    pub fn contains(&self, term: &str) -> bool {
        self.frequencies.contains_key(term)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.frequencies.keys().map(String::as_str)
    }
}

pub fn extract_feature_profile(item: &CulturalItem) -> Result<FeatureProfile, TextError> {
    FeatureProfile::from_lemmas(&item.id, &lemmatize(&item.description))
}

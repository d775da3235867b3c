//! Emotion and moral-foundation lexicons, and the basic prototypes built
//! from them.
//!
//! Emotion lexicon: tab-separated `term<TAB>emotion<TAB>score`, header
//! optional. Value lexicon: comma-separated
//! `term,foundation,polarity,probability`, header required. Both accept
//! `#` comment lines and blank lines.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{Feature, KbError, Prototype, PrototypeKind};
use crate::mapping::{Emotion, Foundation, Polarity, ValuePole};

/// Default number of candidate features per basic prototype.
pub const DEFAULT_K: usize = 10;

/// Smallest margin above 0.5 a rescaled probability may take.
pub const RESCALE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("empty prototype: no lexicon entries for {0}")]
    EmptyPrototype(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Kb(#[from] KbError),
}

impl LexiconError {
    fn parse(line: u64, message: impl Into<String>) -> Self {
        LexiconError::Parse { line, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionLexiconEntry {
    pub term: String,
    pub emotion: Emotion,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueLexiconEntry {
    pub term: String,
    pub foundation: Foundation,
    pub polarity: Polarity,
    pub probability: f64,
}

impl ValueLexiconEntry {
    pub fn pole(&self) -> ValuePole {
        ValuePole::new(self.foundation, self.polarity)
    }
}

fn reader(content: &str, delimiter: u8) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes())
}

fn unit_interval(raw: &str, line: u64, what: &str) -> Result<f64, LexiconError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| LexiconError::parse(line, format!("unparsable {what} {raw:?}")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(LexiconError::parse(line, format!("{what} outside [0,1]: {raw}")));
    }
    Ok(v)
}

fn term(raw: &str, line: u64) -> Result<String, LexiconError> {
    if raw.is_empty() || raw.chars().any(char::is_whitespace) {
        return Err(LexiconError::parse(line, format!("invalid term {raw:?}")));
    }
    Ok(raw.to_lowercase())
}

fn is_blank(record: &csv::StringRecord) -> bool {
    record.iter().all(str::is_empty)
}

pub fn parse_emotion_lexicon(content: &str) -> Result<Vec<EmotionLexiconEntry>, LexiconError> {
    let mut out = Vec::new();
    let mut first = true;
    for record in reader(content, b'\t').records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            LexiconError::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if is_blank(&record) {
            continue;
        }
        if record.len() != 3 {
            return Err(LexiconError::parse(
                line,
                format!("expected 3 tab-separated fields, found {}", record.len()),
            ));
        }
        let is_header = first
            && record[2].parse::<f64>().is_err()
            && record[1].parse::<Emotion>().is_err();
        first = false;
        if is_header {
            continue;
        }
        let emotion = record[1]
            .parse::<Emotion>()
            .map_err(|e| LexiconError::parse(line, e.to_string()))?;
        out.push(EmotionLexiconEntry {
            term: term(&record[0], line)?,
            emotion,
            score: unit_interval(&record[2], line, "score")?,
        });
    }
    Ok(out)
}

const VALUE_HEADER: [&str; 4] = ["term", "foundation", "polarity", "probability"];

pub fn parse_value_lexicon(content: &str) -> Result<Vec<ValueLexiconEntry>, LexiconError> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for record in reader(content, b',').records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            LexiconError::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if is_blank(&record) {
            continue;
        }
        if !seen_header {
            let matches = record.len() == 4
                && record.iter().zip(VALUE_HEADER).all(|(a, b)| a.eq_ignore_ascii_case(b));
            if !matches {
                return Err(LexiconError::parse(
                    line,
                    "missing header term,foundation,polarity,probability",
                ));
            }
            seen_header = true;
            continue;
        }
        if record.len() != 4 {
            return Err(LexiconError::parse(
                line,
                format!("expected 4 comma-separated fields, found {}", record.len()),
            ));
        }
        let foundation = record[1]
            .parse::<Foundation>()
            .map_err(|e| LexiconError::parse(line, e.to_string()))?;
        let polarity = record[2]
            .parse::<Polarity>()
            .map_err(|e| LexiconError::parse(line, e.to_string()))?;
        out.push(ValueLexiconEntry {
            term: term(&record[0], line)?,
            foundation,
            polarity,
            probability: unit_interval(&record[3], line, "probability")?,
        });
    }
    Ok(out)
}

/// Canonical TSV form, with header.
pub fn write_emotion_lexicon(entries: &[EmotionLexiconEntry]) -> String {
    let mut out = String::from("term\temotion\tscore\n");
    for e in entries {
        let _ = writeln!(out, "{}\t{}\t{}", e.term, e.emotion, e.score);
    }
    out
}

/// Canonical CSV form, with header.
pub fn write_value_lexicon(entries: &[ValueLexiconEntry]) -> String {
    let mut out = VALUE_HEADER.join(",");
    out.push('\n');
    for e in entries {
        let _ = writeln!(out, "{},{},{},{}", e.term, e.foundation, e.polarity, e.probability);
    }
    out
}

/// Maps a lexicon score in `[0, 1]` onto a typicality probability in
/// `(0.5, 1]`, preserving order.
pub fn rescale(score: f64) -> f64 {
    (0.5 + score / 2.0).max(0.5 + RESCALE_EPSILON)
}

/// Top-k by descending score, ties by term; duplicates keep their best score.
fn top_k<'a>(rows: impl Iterator<Item = (&'a str, f64)>, k: usize) -> Result<Vec<Feature>, KbError> {
    let mut rows: Vec<(&str, f64)> = rows.collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut seen = std::collections::BTreeSet::new();
    rows.into_iter()
        .filter(|(t, _)| seen.insert(*t))
        .take(k)
        .map(|(t, s)| Feature::new(t, rescale(s)))
        .collect()
}

pub fn build_emotion_prototype(
    entries: &[EmotionLexiconEntry],
    emotion: Emotion,
    k: usize,
) -> Result<Prototype, LexiconError> {
    if k == 0 {
        return Err(LexiconError::ZeroK);
    }
    let rows = entries
        .iter()
        .filter(|e| e.emotion == emotion)
        .map(|e| (e.term.as_str(), e.score));
    let typical = top_k(rows, k)?;
    if typical.is_empty() {
        return Err(LexiconError::EmptyPrototype(emotion.label().to_string()));
    }
    Ok(Prototype::basic(emotion.label(), PrototypeKind::Emotion, Vec::new(), typical)?)
}

/// Prototype named by the pole label: "sanctity" for the virtue pole,
/// "degradation" for the vice pole.
pub fn build_value_prototype(
    entries: &[ValueLexiconEntry],
    pole: ValuePole,
    k: usize,
) -> Result<Prototype, LexiconError> {
    if k == 0 {
        return Err(LexiconError::ZeroK);
    }
    let rows = entries
        .iter()
        .filter(|e| e.pole() == pole)
        .map(|e| (e.term.as_str(), e.probability));
    let typical = top_k(rows, k)?;
    if typical.is_empty() {
        return Err(LexiconError::EmptyPrototype(pole.label().to_string()));
    }
    Ok(Prototype::basic(pole.label(), PrototypeKind::Value, Vec::new(), typical)?)
}

/// Every emotion prototype the lexicon can support, in label order.
pub fn build_emotion_prototypes(
    entries: &[EmotionLexiconEntry],
    k: usize,
) -> Result<Vec<Prototype>, LexiconError> {
    let mut labels: Vec<Emotion> = entries.iter().map(|e| e.emotion).collect();
    labels.sort();
    labels.dedup();
    labels.into_iter().map(|e| build_emotion_prototype(entries, e, k)).collect()
}

/// Every value prototype the lexicon can support, in pole order.
pub fn build_value_prototypes(
    entries: &[ValueLexiconEntry],
    k: usize,
) -> Result<Vec<Prototype>, LexiconError> {
    ValuePole::all()
        .filter(|pole| entries.iter().any(|e| e.pole() == *pole))
        .map(|pole| build_value_prototype(entries, pole, k))
        .collect()
}

/// Converts an eMFD-style table (one probability column per foundation, one
/// sentiment column per foundation) into canonical value-lexicon entries.
///
/// Each word goes to the foundation with the highest probability; the
/// polarity is vice when that foundation's sentiment is negative.
pub fn convert_emfd(content: &str) -> Result<Vec<ValueLexiconEntry>, LexiconError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(content.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| LexiconError::parse(1, e.to_string()))?
        .clone();
    let column = |name: &str| -> Result<usize, LexiconError> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| LexiconError::parse(1, format!("missing column {name:?}")))
    };
    let word_col = column("word")?;
    let mut prob_cols = Vec::new();
    let mut sent_cols = Vec::new();
    for f in Foundation::ALL {
        prob_cols.push(column(&format!("{}_p", f.name()))?);
        sent_cols.push(column(&format!("{}_sent", f.name()))?);
    }

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            LexiconError::parse(e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let number = |i: usize| -> Result<f64, LexiconError> {
            field(i)
                .parse()
                .map_err(|_| LexiconError::parse(line, format!("unparsable number {:?}", field(i))))
        };
        let mut best = (0, f64::NEG_INFINITY);
        for (idx, col) in prob_cols.iter().enumerate() {
            let p = number(*col)?;
            if p > best.1 {
                best = (idx, p);
            }
        }
        let foundation = Foundation::ALL[best.0];
        let polarity = if number(sent_cols[best.0])? < 0.0 { Polarity::Vice } else { Polarity::Virtue };
        out.push(ValueLexiconEntry {
            term: term(field(word_col), line)?,
            foundation,
            polarity,
            probability: unit_interval(field(prob_cols[best.0]), line, "probability")?,
        });
    }
    Ok(out)
}

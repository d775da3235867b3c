//! Similar and value-opposite items, ranked from their classifications.
//!
//! Similarity is the Jaccard index of the label sets. Opposition flips the
//! value pole of every seed label (sanctity <-> degradation, ...) and scores a
//! candidate by the share of its labels that fall in one of the flipped poles.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::Classification;
use crate::mapping::{opposite_value_pole, Emotion, ValuePole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecommendError {
    #[error("unclassifiable seed {0:?}: it carries no labels")]
    UnclassifiableSeed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Similar,
    Opposite,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "similar" => Ok(Mode::Similar),
            "opposite" => Ok(Mode::Opposite),
            other => Err(format!("unknown mode {other:?}, expected similar or opposite")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub item_id: String,
    pub score: f64,
    /// Shared labels (similar) or the candidate's opposed labels (opposite).
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion_contrast: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub seed_id: String,
    pub mode: Mode,
    pub ranked: Vec<RankedItem>,
}

/// Splits "degradation-disgust" into its value pole and emotion.
pub fn parse_compound_label(label: &str) -> Option<(ValuePole, Option<Emotion>)> {
    let (value, emotion) = label.split_once('-')?;
    let pole = ValuePole::from_label(value).ok()?;
    Some((pole, emotion.parse().ok()))
}

fn check_seed(seed: &Classification) -> Result<(), RecommendError> {
    if seed.is_labeled() {
        Ok(())
    } else {
        Err(RecommendError::UnclassifiableSeed(seed.item_id.clone()))
    }
}

fn rank(mut ranked: Vec<RankedItem>, limit: usize) -> Vec<RankedItem> {
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.emotion_contrast.cmp(&a.emotion_contrast))
            .then_with(|| a.item_id.cmp(&b.item_id))
    });
    ranked.truncate(limit);
    ranked
}

pub fn similar_items(
    seed: &Classification,
    catalog: &[Classification],
    limit: usize,
) -> Result<Recommendation, RecommendError> {
    check_seed(seed)?;
    let seed_labels: BTreeSet<&str> = seed.labels.iter().map(String::as_str).collect();
    let ranked = catalog
        .iter()
        .filter(|c| c.item_id != seed.item_id)
        .filter_map(|c| {
            let labels: BTreeSet<&str> = c.labels.iter().map(String::as_str).collect();
            let shared: Vec<String> =
                seed_labels.intersection(&labels).map(|s| s.to_string()).collect();
            if shared.is_empty() {
                return None;
            }
            let union = seed_labels.union(&labels).count();
            Some(RankedItem {
                item_id: c.item_id.clone(),
                score: shared.len() as f64 / union as f64,
                labels: shared,
                emotion_contrast: None,
            })
        })
        .collect();
    Ok(Recommendation { seed_id: seed.item_id.clone(), mode: Mode::Similar, ranked: rank(ranked, limit) })
}

/// Items whose labels sit on the flipped value pole of some seed label.
///
/// With `emotion_contrast`, equal scores are further ordered by whether the
/// candidate's opposed labels carry an emotion opposite (on the wheel) to an
/// emotion of the seed.
pub fn opposite_items(
    seed: &Classification,
    catalog: &[Classification],
    limit: usize,
    emotion_contrast: bool,
) -> Result<Recommendation, RecommendError> {
    check_seed(seed)?;
    let parsed: Vec<(ValuePole, Option<Emotion>)> =
        seed.labels.iter().filter_map(|l| parse_compound_label(l)).collect();
    let opposed: BTreeSet<ValuePole> = parsed.iter().map(|(p, _)| opposite_value_pole(*p)).collect();
    let seed_emotions: Vec<Emotion> = parsed.iter().filter_map(|(_, e)| *e).collect();

    let ranked = catalog
        .iter()
        .filter(|c| c.item_id != seed.item_id && c.is_labeled())
        .filter_map(|c| {
            let hits: Vec<&String> = c
                .labels
                .iter()
                .filter(|l| parse_compound_label(l).is_some_and(|(p, _)| opposed.contains(&p)))
                .collect();
            if hits.is_empty() {
                return None;
            }
            let contrast = emotion_contrast.then(|| {
                hits.iter().filter_map(|l| parse_compound_label(l)?.1).any(|e| {
                    seed_emotions.iter().any(|s| s.contrasts_with(e))
                })
            });
            let distinct: BTreeSet<&String> = c.labels.iter().collect();
            Some(RankedItem {
                item_id: c.item_id.clone(),
                score: hits.len() as f64 / distinct.len() as f64,
                labels: hits.into_iter().cloned().collect(),
                emotion_contrast: contrast,
            })
        })
        .collect();
    Ok(Recommendation { seed_id: seed.item_id.clone(), mode: Mode::Opposite, ranked: rank(ranked, limit) })
}

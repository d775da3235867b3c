//! Explainable classification of feature profiles against compound
//! prototypes.
//!
//! An item belongs to a compound when its profile contains every rigid
//! property of the compound and at least `threshold` of its typical
//! properties. Matching is exact lemma presence; frequencies do not weigh in.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{KnowledgeBase, Prototype};
use crate::text::FeatureProfile;

pub const DEFAULT_THRESHOLD: f64 = 0.30;

/// Slack for coverage values that equal the threshold up to rounding.
const COVERAGE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("threshold must lie in (0, 1], got {0}")]
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    threshold: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { threshold: DEFAULT_THRESHOLD }
    }
}

impl ClassifierConfig {
    pub fn new(threshold: f64) -> Result<Self, ClassifierError> {
        if threshold > 0.0 && threshold <= 1.0 {
            Ok(Self { threshold })
        } else {
            Err(ClassifierError::Threshold(threshold))
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub prototype_name: String,
    pub matched_rigid: Vec<String>,
    /// In the prototype's canonical feature order.
    pub matched_typical: Vec<String>,
    pub coverage: f64,
    pub accepted: bool,
}

pub fn match_prototype(profile: &FeatureProfile, prototype: &Prototype, config: &ClassifierConfig) -> MatchResult {
    let matched_rigid: Vec<String> =
        prototype.rigid().iter().filter(|t| profile.contains(t)).cloned().collect();
    let matched_typical: Vec<String> = prototype
        .typical()
        .iter()
        .filter(|f| profile.contains(&f.term))
        .map(|f| f.term.clone())
        .collect();
    let coverage = if prototype.typical().is_empty() {
        0.0
    } else {
        matched_typical.len() as f64 / prototype.typical().len() as f64
    };
    let accepted = matched_rigid.len() == prototype.rigid().len()
        && !prototype.typical().is_empty()
        && coverage + COVERAGE_EPSILON >= config.threshold;
    MatchResult {
        prototype_name: prototype.name().to_string(),
        matched_rigid,
        matched_typical,
        coverage,
        accepted,
    }
}

/// Matched terms attributed to one parent of the compound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribution {
    pub concept: String,
    pub terms: Vec<String>,
}

/// Why an item carries a label: the trigger words, split between the
/// value parent (HEAD) and the emotion parent (MODIFIER). A term both parents
/// share shows up in both columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub label: String,
    pub coverage: f64,
    pub matches: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rigid: Vec<String>,
    pub emotion: Attribution,
    pub value: Attribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub item_id: String,
    /// Accepted compounds, highest coverage first, ties by name.
    pub labels: Vec<String>,
    pub explanations: Vec<Explanation>,
}

impl Classification {
    pub fn unlabeled(item_id: impl Into<String>) -> Self {
        Self { item_id: item_id.into(), labels: Vec::new(), explanations: Vec::new() }
    }

    pub fn explanation(&self, label: &str) -> Option<&Explanation> {
        self.explanations.iter().find(|e| e.label == label)
    }

    pub fn is_labeled(&self) -> bool {
        !self.labels.is_empty()
    }
}

fn attribute(kb: &KnowledgeBase, parent: &str, matched: &[String]) -> Attribution {
    let terms = match kb.get(parent) {
        Some(p) => matched.iter().filter(|t| p.mentions(t)).cloned().collect(),
        None => Vec::new(),
    };
    Attribution { concept: parent.to_string(), terms }
}

/// Matches the profile against every compound of the knowledge base.
pub fn classify_item(profile: &FeatureProfile, kb: &KnowledgeBase, config: &ClassifierConfig) -> Classification {
    let mut accepted: Vec<(MatchResult, &Prototype)> = kb
        .compounds()
        .map(|c| (match_prototype(profile, c, config), c))
        .filter(|(m, _)| m.accepted)
        .collect();
    accepted.sort_by(|(a, _), (b, _)| {
        b.coverage
            .partial_cmp(&a.coverage)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.prototype_name.cmp(&b.prototype_name))
    });

    let mut labels = Vec::with_capacity(accepted.len());
    let mut explanations = Vec::with_capacity(accepted.len());
    for (m, compound) in accepted {
        let all: Vec<String> = m.matched_typical.iter().chain(&m.matched_rigid).cloned().collect();
        let (value, emotion) = match compound.parents() {
            Some(parents) => (
                attribute(kb, &parents.head, &all),
                attribute(kb, &parents.modifier, &all),
            ),
            None => (
                Attribution { concept: String::new(), terms: Vec::new() },
                Attribution { concept: String::new(), terms: Vec::new() },
            ),
        };
        labels.push(m.prototype_name.clone());
        explanations.push(Explanation {
            label: m.prototype_name,
            coverage: m.coverage,
            matches: m.matched_typical,
            rigid: m.matched_rigid,
            emotion,
            value,
        });
    }
    Classification { item_id: profile.item_id.clone(), labels, explanations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{Feature, OppositionTable, Parents, PrototypeKind};

    fn profile(terms: &[&str]) -> FeatureProfile {
        let lemmas: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        FeatureProfile::from_lemmas("item", &lemmas).unwrap()
    }

    fn features(terms: &[(&str, f64)]) -> Vec<Feature> {
        terms.iter().map(|(t, p)| Feature::new(*t, *p).unwrap()).collect()
    }

    fn fixture_kb() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(OppositionTable::new());
        kb.insert(
            Prototype::basic(
                "degradation",
                PrototypeKind::Value,
                Vec::new(),
                features(&[("desecrate", 0.94), ("weapon", 0.9), ("impure", 0.8)]),
            )
            .unwrap(),
        )
        .unwrap();
        kb.insert(
            Prototype::basic(
                "disgust",
                PrototypeKind::Emotion,
                Vec::new(),
                features(&[("molestation", 0.925), ("sickening", 0.85), ("filth", 0.81)]),
            )
            .unwrap(),
        )
        .unwrap();
        kb.insert(
            Prototype::compound(
                "degradation-disgust",
                Parents { head: "degradation".into(), modifier: "disgust".into() },
                Vec::new(),
                features(&[
                    ("desecrate", 0.94),
                    ("weapon", 0.9),
                    ("molestation", 0.925),
                    ("sickening", 0.85),
                    ("filth", 0.81),
                ]),
                7,
            )
            .unwrap(),
        )
        .unwrap();
        kb
    }

    fn seven() -> Prototype {
        let f = features(&[
            ("a", 0.9),
            ("b", 0.9),
            ("c", 0.9),
            ("d", 0.9),
            ("e", 0.9),
            ("f", 0.9),
            ("g", 0.9),
        ]);
        Prototype::compound("h-m", Parents { head: "h".into(), modifier: "m".into() }, Vec::new(), f, 7)
            .unwrap()
    }

    #[test]
    fn catapult_like_profile_matches_degradation_disgust() {
        let kb = fixture_kb();
        let p = profile(&["catapult", "molestation", "weapon", "siege"]);
        let m = match_prototype(&p, kb.get("degradation-disgust").unwrap(), &ClassifierConfig::default());
        assert_eq!(m.matched_typical, ["molestation", "weapon"]);
        assert!((m.coverage - 0.4).abs() < 1e-12);
        assert!(m.accepted);

        let c = classify_item(&p, &kb, &ClassifierConfig::default());
        assert_eq!(c.labels, ["degradation-disgust"]);
        let e = c.explanation("degradation-disgust").unwrap();
        assert_eq!(e.emotion, Attribution { concept: "disgust".into(), terms: vec!["molestation".into()] });
        assert_eq!(e.value, Attribution { concept: "degradation".into(), terms: vec!["weapon".into()] });
    }

    #[test]
    fn seven_feature_boundary() {
        let config = ClassifierConfig::default();
        let m = match_prototype(&profile(&["a", "b"]), &seven(), &config);
        assert!(m.coverage < 0.30);
        assert!(!m.accepted);
        let m = match_prototype(&profile(&["a", "b", "c"]), &seven(), &config);
        assert!((m.coverage - 3.0 / 7.0).abs() < 1e-12);
        assert!(m.accepted);
    }

    #[test]
    fn coverage_equal_to_threshold_is_accepted() {
        let terms: Vec<(String, f64)> = (0..10).map(|i| (format!("t{i}"), 0.9)).collect();
        let f: Vec<Feature> = terms.iter().map(|(t, p)| Feature::new(t.clone(), *p).unwrap()).collect();
        let proto = Prototype::compound("x-y", Parents { head: "x".into(), modifier: "y".into() }, Vec::new(), f, 10)
            .unwrap();
        let m = match_prototype(&profile(&["t0", "t1", "t2"]), &proto, &ClassifierConfig::default());
        assert_eq!(m.coverage, 0.3);
        assert!(m.accepted);
    }

    #[test]
    fn unmet_rigid_property_rejects() {
        let f = features(&[("a", 0.9), ("b", 0.8)]);
        let proto = Prototype::compound(
            "x-y",
            Parents { head: "x".into(), modifier: "y".into() },
            vec!["artifact".to_string()],
            f,
            7,
        )
        .unwrap();
        let config = ClassifierConfig::default();
        assert!(!match_prototype(&profile(&["a", "b"]), &proto, &config).accepted);
        assert!(match_prototype(&profile(&["a", "artifact"]), &proto, &config).accepted);
    }

    #[test]
    fn no_matching_terms_gives_no_labels() {
        let c = classify_item(&profile(&["pottery", "jar"]), &fixture_kb(), &ClassifierConfig::default());
        assert!(c.labels.is_empty());
        assert!(!c.is_labeled());
    }

    #[test]
    fn threshold_must_be_in_unit_interval() {
        assert!(ClassifierConfig::new(0.0).is_err());
        assert!(ClassifierConfig::new(1.01).is_err());
        assert!(ClassifierConfig::new(1.0).is_ok());
    }
}

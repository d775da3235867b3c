//! Batch classification of a catalog into a report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::classify::{classify_item, Classification, ClassifierConfig};
use crate::kb::KnowledgeBase;
use crate::text::{extract_feature_profile, stopwords_hash, CulturalItem, TextError};

pub const EMPTY_PROFILE: &str = "empty profile";
pub const NO_MATCH: &str = "no matching prototype";
pub const UNREADABLE: &str = "unreadable description";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("malformed catalog: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed catalog: expected an array of items or an object with an \"items\" array")]
    Shape,
    #[error("malformed catalog: item {index} has no string \"id\"")]
    MissingId { index: usize },
    #[error("duplicate item id {0:?}")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unclassified {
    pub item_id: String,
    pub reason: String,
}

/// Items that parsed, plus those whose description could not be read.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedCatalog {
    pub items: Vec<CulturalItem>,
    pub unreadable: Vec<Unclassified>,
}

impl ParsedCatalog {
    pub fn len(&self) -> usize {
        self.items.len() + self.unreadable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reads a catalog: either a bare array of items or `{"items": [...]}`.
/// An item needs a string `id`; one without a readable `description` is
/// kept aside as unreadable rather than failing the whole catalog.
pub fn parse_catalog_value(value: Value) -> Result<ParsedCatalog, CatalogError> {
    let array = match value {
        Value::Array(a) => a,
        Value::Object(mut o) => match o.remove("items") {
            Some(Value::Array(a)) => a,
            _ => return Err(CatalogError::Shape),
        },
        _ => return Err(CatalogError::Shape),
    };
    let mut seen = BTreeSet::new();
    let mut parsed = ParsedCatalog::default();
    for (index, raw) in array.into_iter().enumerate() {
        let id = raw
            .get("id")
            .and_then(Value::as_str)
            .ok_or(CatalogError::MissingId { index })?
            .to_string();
        if !seen.insert(id.clone()) {
            return Err(CatalogError::DuplicateId(id));
        }
        match serde_json::from_value::<CulturalItem>(raw) {
            Ok(item) => parsed.items.push(item),
            Err(_) => parsed.unreadable.push(Unclassified { item_id: id, reason: UNREADABLE.into() }),
        }
    }
    Ok(parsed)
}

pub fn parse_catalog(text: &str) -> Result<ParsedCatalog, CatalogError> {
    parse_catalog_value(serde_json::from_str(text)?)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub items: usize,
    pub classified: usize,
    pub unclassified: usize,
    pub label_histogram: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub bundle_sha256: String,
    pub stopwords_sha256: String,
    pub threshold: f64,
    /// Every item that yielded a feature profile, in catalog order,
    /// labeled or not.
    pub classifications: Vec<Classification>,
    /// Items without a label, with the reason.
    pub unclassified: Vec<Unclassified>,
    pub summary: Summary,
}

impl Report {
    pub fn classification(&self, item_id: &str) -> Option<&Classification> {
        self.classifications.iter().find(|c| c.item_id == item_id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Builds the report and its summary from per-item outcomes.
    pub fn assemble(
        bundle_sha256: &str,
        config: &ClassifierConfig,
        items: usize,
        classifications: Vec<Classification>,
        unclassified: Vec<Unclassified>,
    ) -> Self {
        let mut label_histogram = BTreeMap::new();
        for label in classifications.iter().flat_map(|c| &c.labels) {
            *label_histogram.entry(label.clone()).or_insert(0) += 1;
        }
        let classified = classifications.iter().filter(|c| c.is_labeled()).count();
        Report {
            bundle_sha256: bundle_sha256.to_string(),
            stopwords_sha256: stopwords_hash().to_string(),
            threshold: config.threshold(),
            summary: Summary { items, classified, unclassified: unclassified.len(), label_histogram },
            classifications,
            unclassified,
        }
    }
}

/// Text pipeline plus classifier for one item. An item whose description
/// holds no content terms gets the "empty profile" reason instead.
pub fn classify_one(
    item: &CulturalItem,
    kb: &KnowledgeBase,
    config: &ClassifierConfig,
) -> Result<Classification, Unclassified> {
    match extract_feature_profile(item) {
        Ok(profile) => Ok(classify_item(&profile, kb, config)),
        Err(TextError::EmptyProfile(_)) => {
            Err(Unclassified { item_id: item.id.clone(), reason: EMPTY_PROFILE.into() })
        }
    }
}

/// Runs [`classify_one`] over every item.
pub fn classify_catalog(
    catalog: &ParsedCatalog,
    kb: &KnowledgeBase,
    config: &ClassifierConfig,
    bundle_sha256: &str,
) -> Report {
    let mut classifications = Vec::with_capacity(catalog.items.len());
    let mut unclassified = Vec::new();
    for item in &catalog.items {
        match classify_one(item, kb, config) {
            Ok(c) => {
                if !c.is_labeled() {
                    unclassified.push(Unclassified { item_id: item.id.clone(), reason: NO_MATCH.into() });
                }
                classifications.push(c);
            }
            Err(u) => unclassified.push(u),
        }
    }
    unclassified.extend(catalog.unreadable.iter().cloned());
    Report::assemble(bundle_sha256, config, catalog.len(), classifications, unclassified)
}

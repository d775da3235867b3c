//! The prototype bundle: every basic and compound prototype, the opposition
//! table and a manifest of the inputs, as one JSON document.
//!
//! Serialization is canonical (sorted maps, canonical feature order, fixed
//! float formatting), so identical inputs give byte-identical files and the
//! sha256 of the file identifies the bundle.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classify::{ClassifierConfig, DEFAULT_THRESHOLD};
use crate::combine::{build_compound_catalog, CompoundCatalog, DiscardCounts};
use crate::kb::{
    validate_knowledge_base, Feature, KbError, KnowledgeBase, OppositionTable, Parents, Prototype,
    PrototypeKind, Violation, DEFAULT_MAX_FEATURES,
};
use crate::lexicon::{
    build_emotion_prototypes, build_value_prototypes, parse_emotion_lexicon, parse_value_lexicon,
    LexiconError, DEFAULT_K,
};
use crate::mapping::default_oppositions;
use crate::text::stopwords_hash;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{file}: {source}")]
    Lexicon {
        file: String,
        #[source]
        source: LexiconError,
    },
    #[error("oppositions line {line}: {message}")]
    Oppositions { line: usize, message: String },
    #[error("no compounds produced ({failures} pairings failed)")]
    NoCompounds { failures: usize },
    #[error("malformed bundle: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid bundle: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("invalid build configuration: {0}")]
    Config(String),
}

/// Lowercase hex sha256.
pub fn content_hash(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub emotion_lexicon_sha256: String,
    pub value_lexicon_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oppositions_sha256: Option<String>,
    pub stopwords_sha256: String,
    pub k: usize,
    pub max_features: usize,
    pub threshold: f64,
}

/// Winning-scenario metadata kept with each compound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationRecord {
    pub scenario_probability: f64,
    /// Terms kept by the winning scenario, before the feature cap.
    pub kept: Vec<String>,
    pub pool_size: usize,
    pub discarded: DiscardCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleEntry {
    pub kind: PrototypeKind,
    pub rigid: Vec<String>,
    pub typical: Vec<Feature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<Parents>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combination: Option<CombinationRecord>,
}

/// Name → entry, in name order. Deserialization keeps repeated names so that
/// validation can report them instead of silently keeping the last one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrototypeEntries(Vec<(String, BundleEntry)>);

impl PrototypeEntries {
    pub fn iter(&self) -> impl Iterator<Item = (&str, &BundleEntry)> {
        self.0.iter().map(|(n, e)| (n.as_str(), e))
    }

    pub fn get(&self, name: &str) -> Option<&BundleEntry> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for PrototypeEntries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.0.iter().map(|(n, e)| (n, e)))
    }
}

impl<'de> Deserialize<'de> for PrototypeEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = PrototypeEntries;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of prototype names to prototypes")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = map.next_entry::<String, BundleEntry>()? {
                    entries.push(entry);
                }
                Ok(PrototypeEntries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub manifest: Manifest,
    pub oppositions: OppositionTable,
    pub prototypes: PrototypeEntries,
}

fn entry_of(p: &Prototype, combination: Option<CombinationRecord>) -> BundleEntry {
    BundleEntry {
        kind: p.kind(),
        rigid: p.rigid().iter().cloned().collect(),
        typical: p.typical().to_vec(),
        parents: p.parents().cloned(),
        combination,
    }
}

impl Bundle {
    /// Assembles a bundle from the basic prototypes and a compound catalog.
    pub fn assemble(
        manifest: Manifest,
        oppositions: OppositionTable,
        basics: &[Prototype],
        catalog: &CompoundCatalog,
    ) -> Self {
        let mut map: BTreeMap<String, BundleEntry> = BTreeMap::new();
        for p in basics {
            map.insert(p.name().to_string(), entry_of(p, None));
        }
        for r in &catalog.results {
            let record = CombinationRecord {
                scenario_probability: r.winning_scenario.probability,
                kept: r.winning_scenario.kept.iter().map(|&i| r.pool[i].feature.clone()).collect(),
                pool_size: r.pool.len(),
                discarded: r.discarded,
            };
            map.insert(r.compound.name().to_string(), entry_of(&r.compound, Some(record)));
        }
        Bundle { manifest, oppositions, prototypes: PrototypeEntries(map.into_iter().collect()) }
    }

    pub fn from_json(text: &str) -> Result<Self, BundleError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    /// Hash of [`Bundle::to_json`]; equals the hash of a bundle file written
    /// by this crate.
    pub fn hash(&self) -> String {
        content_hash(self.to_json())
    }

    pub fn classifier_config(&self) -> Result<ClassifierConfig, BundleError> {
        ClassifierConfig::new(self.manifest.threshold).map_err(|e| BundleError::Config(e.to_string()))
    }

    /// The knowledge base the bundle describes, after validation.
    pub fn knowledge_base(&self) -> Result<KnowledgeBase, BundleError> {
        let mut prototypes = Vec::with_capacity(self.prototypes.len());
        for (name, e) in self.prototypes.iter() {
            // built field by field so bad input lands in the violation list
            // instead of tripping the constructor checks
            prototypes.push(Prototype {
                name: name.to_string(),
                kind: e.kind,
                rigid: e.rigid.iter().cloned().collect(),
                typical: e.typical.clone(),
                parents: e.parents.clone(),
            });
        }
        let kb = KnowledgeBase::from_parts_unchecked(
            prototypes,
            self.oppositions.clone(),
            self.manifest.max_features,
        );
        let violations = validate_knowledge_base(&kb);
        if violations.is_empty() {
            Ok(kb)
        } else {
            Err(BundleError::Invalid(violations))
        }
    }
}

/// Parses a tab- or comma-separated list of opposed term pairs, one per line.
pub fn parse_oppositions(content: &str) -> Result<OppositionTable, BundleError> {
    let mut table = OppositionTable::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(['\t', ',']).map(str::trim).collect();
        let err = |message: String| BundleError::Oppositions { line: i + 1, message };
        match fields.as_slice() {
            [a, b] => table.insert(*a, *b).map_err(|e| err(e.to_string()))?,
            _ => return Err(err(format!("expected two terms, got {}", fields.len()))),
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    pub k: usize,
    pub max_features: usize,
    pub threshold: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self { k: DEFAULT_K, max_features: DEFAULT_MAX_FEATURES, threshold: DEFAULT_THRESHOLD }
    }
}

/// Lexicon texts in, bundle out. `oppositions` adds term pairs to the ones
/// implied by the emotion wheel and the foundation names.
pub fn build_bundle(
    emotion_lexicon: &str,
    value_lexicon: &str,
    oppositions: Option<&str>,
    config: &BuildConfig,
) -> Result<Bundle, BundleError> {
    ClassifierConfig::new(config.threshold).map_err(|e| BundleError::Config(e.to_string()))?;
    if config.max_features == 0 {
        return Err(BundleError::Config("max_features must be positive".into()));
    }
    let lexicon_err = |file: &str| {
        let file = file.to_string();
        move |source| BundleError::Lexicon { file, source }
    };
    let emotion_entries = parse_emotion_lexicon(emotion_lexicon).map_err(lexicon_err("emotion lexicon"))?;
    let value_entries = parse_value_lexicon(value_lexicon).map_err(lexicon_err("value lexicon"))?;
    if emotion_entries.is_empty() {
        return Err(lexicon_err("emotion lexicon")(LexiconError::EmptyPrototype("any emotion".into())));
    }
    if value_entries.is_empty() {
        return Err(lexicon_err("value lexicon")(LexiconError::EmptyPrototype("any value".into())));
    }
    let emotions = build_emotion_prototypes(&emotion_entries, config.k).map_err(lexicon_err("emotion lexicon"))?;
    let values = build_value_prototypes(&value_entries, config.k).map_err(lexicon_err("value lexicon"))?;

    let mut table = default_oppositions();
    if let Some(text) = oppositions {
        table.extend(&parse_oppositions(text)?);
    }
    let catalog = build_compound_catalog(&values, &emotions, &table, config.max_features);
    if catalog.results.is_empty() {
        return Err(BundleError::NoCompounds { failures: catalog.failures.len() });
    }
    let manifest = Manifest {
        emotion_lexicon_sha256: content_hash(emotion_lexicon),
        value_lexicon_sha256: content_hash(value_lexicon),
        oppositions_sha256: oppositions.map(content_hash),
        stopwords_sha256: stopwords_hash().to_string(),
        k: config.k,
        max_features: config.max_features,
        threshold: config.threshold,
    };
    let basics: Vec<Prototype> = values.into_iter().chain(emotions).collect();
    Ok(Bundle::assemble(manifest, table, &basics, &catalog))
}

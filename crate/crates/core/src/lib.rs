//! Prototype reasoning over values and emotions: lexicon ingestion,
//! probabilistic concept combination, text classification and
//! value-aware recommendation.

pub mod bundle;
pub mod classify;
pub mod combine;
pub mod fixtures;
pub mod kb;
pub mod lexicon;
pub mod mapping;
pub mod recommend;
pub mod report;
pub mod text;

pub use classify::{classify_item, ClassifierConfig, Classification};
pub use combine::{build_compound_catalog, combine_concepts, CombinationRequest, CombinationResult};
pub use kb::{KnowledgeBase, OppositionTable, Prototype, PrototypeKind};
pub use text::{extract_feature_profile, CulturalItem, FeatureProfile};

//! Small bundled inputs: mini lexicons, an opposition list and a 12-item
//! museum catalog. Used by the tests and handy for trying the CLI.

pub const EMOTION_LEXICON: &str = include_str!("../fixtures/emotions.tsv");
pub const VALUE_LEXICON: &str = include_str!("../fixtures/values.csv");
pub const OPPOSITIONS: &str = include_str!("../fixtures/oppositions.tsv");
pub const CATALOG: &str = include_str!("../fixtures/hecht_catalog.json");

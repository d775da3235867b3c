//! Concepts, typicality inclusions and knowledge-base validation.
//!
//! A [`Prototype`] is a flat feature bag: a set of rigid properties that hold
//! for every member, and a list of typical properties `p :: T(C) ⊑ d`, each
//! weighted by a probability in `(0.5, 1]`. Typical features are always kept
//! in canonical order (descending probability, then term) so that everything
//! derived from them is deterministic.
//!
//! The checked constructors reject invalid input. Values that arrive through
//! deserialization are not checked; run [`validate_knowledge_base`] on them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of typical features of a compound prototype.
pub const DEFAULT_MAX_FEATURES: usize = 7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbError {
    #[error("probability must exceed 0.5 and be at most 1 (got {0})")]
    Probability(f64),
    #[error("term must be a non-empty lowercase lemma (got {0:?})")]
    Term(String),
    #[error("term {0:?} is both rigid and typical")]
    RigidTypicalOverlap(String),
    #[error("duplicate typical term {0:?}")]
    DuplicateFeature(String),
    #[error("compound {name} has {count} typical features, cap is {max}")]
    TooManyFeatures { name: String, count: usize, max: usize },
    #[error("duplicate prototype name {0:?}")]
    DuplicateName(String),
    #[error("dangling parent {parent:?} of {name:?}")]
    DanglingParent { name: String, parent: String },
    #[error("a term cannot oppose itself ({0:?})")]
    SelfOpposition(String),
}

/// A typicality weight in `(0.5, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self, KbError> {
        if Self::in_range(p) {
            Ok(Self(p))
        } else {
            Err(KbError::Probability(p))
        }
    }

    pub fn in_range(p: f64) -> bool {
        p > 0.5 && p <= 1.0
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Lowercase, non-empty, no whitespace.
pub fn is_valid_term(term: &str) -> bool {
    !term.is_empty()
        && !term.chars().any(char::is_whitespace)
        && term.chars().all(|c| !c.is_uppercase())
}

fn check_term(term: &str) -> Result<(), KbError> {
    if is_valid_term(term) {
        Ok(())
    } else {
        Err(KbError::Term(term.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrototypeKind {
    Emotion,
    Value,
    Compound,
}

impl fmt::Display for PrototypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrototypeKind::Emotion => "emotion",
            PrototypeKind::Value => "value",
            PrototypeKind::Compound => "compound",
        })
    }
}

/// One typical property of a prototype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub term: String,
    pub p: Probability,
}

impl Feature {
    pub fn new(term: impl Into<String>, p: f64) -> Result<Self, KbError> {
        let term = term.into();
        check_term(&term)?;
        Ok(Self { term, p: Probability::new(p)? })
    }
}

/// Canonical feature order: descending probability, then lexicographic term.
pub fn canonical_order(a: &Feature, b: &Feature) -> Ordering {
    b.p.get()
        .total_cmp(&a.p.get())
        .then_with(|| a.term.cmp(&b.term))
}

/// HEAD and MODIFIER of a compound concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parents {
    pub head: String,
    pub modifier: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prototype {
    pub(crate) name: String,
    pub(crate) kind: PrototypeKind,
    pub(crate) rigid: BTreeSet<String>,
    pub(crate) typical: Vec<Feature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub(crate) parents: Option<Parents>,
}

impl Prototype {
    /// Builds a basic (emotion or value) prototype.
    pub fn basic(
        name: impl Into<String>,
        kind: PrototypeKind,
        rigid: impl IntoIterator<Item = String>,
        typical: Vec<Feature>,
    ) -> Result<Self, KbError> {
        assert!(kind != PrototypeKind::Compound, "use Prototype::compound");
        Self::checked(name.into(), kind, rigid.into_iter().collect(), typical, None, usize::MAX)
    }

    pub fn compound(
        name: impl Into<String>,
        parents: Parents,
        rigid: impl IntoIterator<Item = String>,
        typical: Vec<Feature>,
        max_features: usize,
    ) -> Result<Self, KbError> {
        Self::checked(
            name.into(),
            PrototypeKind::Compound,
            rigid.into_iter().collect(),
            typical,
            Some(parents),
            max_features,
        )
    }

    fn checked(
        name: String,
        kind: PrototypeKind,
        rigid: BTreeSet<String>,
        mut typical: Vec<Feature>,
        parents: Option<Parents>,
        max_features: usize,
    ) -> Result<Self, KbError> {
        for term in &rigid {
            check_term(term)?;
        }
        let mut seen = BTreeSet::new();
        for f in &typical {
            check_term(&f.term)?;
            Probability::new(f.p.get())?;
            if !seen.insert(f.term.as_str()) {
                return Err(KbError::DuplicateFeature(f.term.clone()));
            }
            if rigid.contains(&f.term) {
                return Err(KbError::RigidTypicalOverlap(f.term.clone()));
            }
        }
        if kind == PrototypeKind::Compound && typical.len() > max_features {
            return Err(KbError::TooManyFeatures { name, count: typical.len(), max: max_features });
        }
        typical.sort_by(canonical_order);
        Ok(Self { name, kind, rigid, typical, parents })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> PrototypeKind {
        self.kind
    }

    pub fn rigid(&self) -> &BTreeSet<String> {
        &self.rigid
    }

    /// Typical features in canonical order.
    pub fn typical(&self) -> &[Feature] {
        &self.typical
    }

    pub fn parents(&self) -> Option<&Parents> {
        self.parents.as_ref()
    }

    pub fn probability_of(&self, term: &str) -> Option<f64> {
        self.typical.iter().find(|f| f.term == term).map(|f| f.p.get())
    }

    pub fn has_typical(&self, term: &str) -> bool {
        self.typical.iter().any(|f| f.term == term)
    }

    /// True if `term` is a rigid or typical property.
    pub fn mentions(&self, term: &str) -> bool {
        self.rigid.contains(term) || self.has_typical(term)
    }
}

/// Symmetric set of mutually inconsistent term pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OppositionTable {
    pairs: BTreeSet<(String, String)>,
}

impl OppositionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self, KbError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut table = Self::new();
        for (a, b) in pairs {
            table.insert(a, b)?;
        }
        Ok(table)
    }

    /// Inserts both orientations of the pair.
    pub fn insert(&mut self, a: impl Into<String>, b: impl Into<String>) -> Result<(), KbError> {
        let (a, b) = (a.into(), b.into());
        check_term(&a)?;
        check_term(&b)?;
        if a == b {
            return Err(KbError::SelfOpposition(a));
        }
        self.pairs.insert((b.clone(), a.clone()));
        self.pairs.insert((a, b));
        Ok(())
    }

    pub fn extend(&mut self, other: &OppositionTable) {
        self.pairs.extend(other.pairs.iter().cloned());
    }

    pub fn opposed(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&(a.to_string(), b.to_string()))
    }

    /// Ordered pairs, both orientations included.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    prototypes: Vec<Prototype>,
    #[serde(default)]
    oppositions: OppositionTable,
    #[serde(default = "default_max_features")]
    max_features: usize,
}

fn default_max_features() -> usize {
    DEFAULT_MAX_FEATURES
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        Self::new(OppositionTable::new())
    }
}

impl KnowledgeBase {
    pub fn new(oppositions: OppositionTable) -> Self {
        Self { prototypes: Vec::new(), oppositions, max_features: DEFAULT_MAX_FEATURES }
    }

    pub fn with_max_features(mut self, max_features: usize) -> Self {
        self.max_features = max_features;
        self
    }

    /// Adds a prototype, refusing duplicate names, dangling parents and
    /// compounds over the feature cap.
    pub fn insert(&mut self, prototype: Prototype) -> Result<(), KbError> {
        if self.get(&prototype.name).is_some() {
            return Err(KbError::DuplicateName(prototype.name));
        }
        if let Some(parents) = &prototype.parents {
            for parent in [&parents.head, &parents.modifier] {
                if self.get(parent).is_none() {
                    return Err(KbError::DanglingParent {
                        name: prototype.name.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        if prototype.kind == PrototypeKind::Compound && prototype.typical.len() > self.max_features {
            return Err(KbError::TooManyFeatures {
                name: prototype.name.clone(),
                count: prototype.typical.len(),
                max: self.max_features,
            });
        }
        let at = self.prototypes.partition_point(|p| p.name < prototype.name);
        self.prototypes.insert(at, prototype);
        Ok(())
    }

    /// Assembles a knowledge base without checking anything. Used by readers
    /// of external files; pair it with [`validate_knowledge_base`].
    pub fn from_parts_unchecked(
        prototypes: Vec<Prototype>,
        oppositions: OppositionTable,
        max_features: usize,
    ) -> Self {
        Self { prototypes, oppositions, max_features }
    }

    pub fn get(&self, name: &str) -> Option<&Prototype> {
        self.prototypes.iter().find(|p| p.name == name)
    }

    pub fn prototypes(&self) -> &[Prototype] {
        &self.prototypes
    }

    pub fn compounds(&self) -> impl Iterator<Item = &Prototype> {
        self.prototypes.iter().filter(|p| p.kind == PrototypeKind::Compound)
    }

    pub fn oppositions(&self) -> &OppositionTable {
        &self.oppositions
    }

    pub fn max_features(&self) -> usize {
        self.max_features
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    BadProbability { prototype: String, term: String, p: String },
    InvalidTerm { prototype: String, term: String },
    DuplicateFeature { prototype: String, term: String },
    RigidTypicalOverlap { prototype: String, term: String },
    DuplicateName { prototype: String },
    KindParentsMismatch { prototype: String },
    DanglingParent { prototype: String, parent: String },
    TooManyFeatures { prototype: String, count: usize, max: usize },
    NonCanonicalOrder { prototype: String },
    AsymmetricOpposition { a: String, b: String },
    SelfOpposition { term: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadProbability { prototype, term, p } => write!(
                f,
                "{prototype}: probability must exceed 0.5 and be at most 1 ({term} = {p})"
            ),
            Violation::InvalidTerm { prototype, term } => {
                write!(f, "{prototype}: invalid term {term:?}")
            }
            Violation::DuplicateFeature { prototype, term } => {
                write!(f, "{prototype}: duplicate typical term {term:?}")
            }
            Violation::RigidTypicalOverlap { prototype, term } => {
                write!(f, "{prototype}: {term:?} is both rigid and typical")
            }
            Violation::DuplicateName { prototype } => write!(f, "duplicate name {prototype:?}"),
            Violation::KindParentsMismatch { prototype } => {
                write!(f, "{prototype}: parents must be present exactly for compounds")
            }
            Violation::DanglingParent { prototype, parent } => {
                write!(f, "{prototype}: dangling parent {parent:?}")
            }
            Violation::TooManyFeatures { prototype, count, max } => {
                write!(f, "{prototype}: {count} typical features exceed the cap of {max}")
            }
            Violation::NonCanonicalOrder { prototype } => {
                write!(f, "{prototype}: typical features are not in canonical order")
            }
            Violation::AsymmetricOpposition { a, b } => {
                write!(f, "asymmetric opposition ({a}, {b})")
            }
            Violation::SelfOpposition { term } => write!(f, "self opposition {term:?}"),
        }
    }
}

pub type ValidationReport = Vec<Violation>;

/// Checks every invariant of the knowledge base and reports each violation.
/// An empty report means the knowledge base is valid.
pub fn validate_knowledge_base(kb: &KnowledgeBase) -> ValidationReport {
    let mut report = Vec::new();
    let mut names: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &kb.prototypes {
        *names.entry(p.name.as_str()).or_default() += 1;
    }
    for (name, count) in &names {
        if *count > 1 {
            report.push(Violation::DuplicateName { prototype: name.to_string() });
        }
    }

    for proto in &kb.prototypes {
        let name = &proto.name;
        for term in &proto.rigid {
            if !is_valid_term(term) {
                report.push(Violation::InvalidTerm { prototype: name.clone(), term: term.clone() });
            }
        }
        let mut seen = BTreeSet::new();
        for f in &proto.typical {
            if !is_valid_term(&f.term) {
                report.push(Violation::InvalidTerm { prototype: name.clone(), term: f.term.clone() });
            }
            if !Probability::in_range(f.p.get()) {
                report.push(Violation::BadProbability {
                    prototype: name.clone(),
                    term: f.term.clone(),
                    p: f.p.get().to_string(),
                });
            }
            if !seen.insert(f.term.as_str()) {
                report.push(Violation::DuplicateFeature { prototype: name.clone(), term: f.term.clone() });
            }
            if proto.rigid.contains(&f.term) {
                report.push(Violation::RigidTypicalOverlap {
                    prototype: name.clone(),
                    term: f.term.clone(),
                });
            }
        }
        if proto.typical.windows(2).any(|w| canonical_order(&w[0], &w[1]) == Ordering::Greater) {
            report.push(Violation::NonCanonicalOrder { prototype: name.clone() });
        }
        let is_compound = proto.kind == PrototypeKind::Compound;
        if is_compound != proto.parents.is_some() {
            report.push(Violation::KindParentsMismatch { prototype: name.clone() });
        }
        if let Some(parents) = &proto.parents {
            for parent in [&parents.head, &parents.modifier] {
                if !names.contains_key(parent.as_str()) {
                    report.push(Violation::DanglingParent {
                        prototype: name.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        if is_compound && proto.typical.len() > kb.max_features {
            report.push(Violation::TooManyFeatures {
                prototype: name.clone(),
                count: proto.typical.len(),
                max: kb.max_features,
            });
        }
    }

    for (a, b) in kb.oppositions.pairs() {
        if a == b {
            report.push(Violation::SelfOpposition { term: a.to_string() });
        } else if !kb.oppositions.opposed(b, a) {
            report.push(Violation::AsymmetricOpposition { a: a.to_string(), b: b.to_string() });
        }
    }
    report
}

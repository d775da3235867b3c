//! Scenario-based combination of a HEAD and a MODIFIER prototype.
//!
//! The typical properties of both parents are pooled into typicality
//! inclusions. A scenario keeps or drops each inclusion independently; its
//! probability is the product of `p` for every kept inclusion and `1 - p`
//! for every dropped one, so the scenarios of a pool form a probability
//! distribution. Scenarios that are inconsistent, trivial (everything kept)
//! or that starve one of the parents are blocked. The most probable surviving
//! scenario becomes the compound prototype.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{
    canonical_order, Feature, KbError, OppositionTable, Parents, Probability, Prototype,
    PrototypeKind, DEFAULT_MAX_FEATURES,
};
use crate::mapping::{plutchik_for_value_pole, ValuePole};

/// Largest pool [`enumerate_scenarios`] and [`combine_concepts`] accept.
pub const MAX_POOL: usize = 20;

/// Relative tolerance under which two scenario probabilities tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CombineError {
    #[error("pool too large: {0} inclusions, at most {MAX_POOL} supported")]
    PoolTooLarge(usize),
    #[error("no admissible scenario for {head}+{modifier} (discarded: {discarded})")]
    NoAdmissibleScenario { head: String, modifier: String, discarded: DiscardCounts },
    #[error(transparent)]
    Kb(#[from] KbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ParentTag {
    Head,
    Modifier,
    Both,
}

impl ParentTag {
    pub fn from_head(self) -> bool {
        matches!(self, ParentTag::Head | ParentTag::Both)
    }

    pub fn from_modifier(self) -> bool {
        matches!(self, ParentTag::Modifier | ParentTag::Both)
    }
}

/// `p :: T(subject) ⊑ feature`, tagged with the parent it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalityInclusion {
    pub subject: String,
    pub feature: String,
    pub probability: f64,
    pub parent: ParentTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Indices into the pool, ascending.
    pub kept: Vec<usize>,
    pub probability: f64,
}

impl Scenario {
    fn from_mask(mask: u32, n: usize, probability: f64) -> Self {
        Self { kept: (0..n).filter(|i| mask & (1 << i) != 0).collect(), probability }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockReason {
    Inconsistent,
    Trivial,
    HeadStarved,
    ModifierStarved,
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockReason::Inconsistent => "INCONSISTENT",
            BlockReason::Trivial => "TRIVIAL",
            BlockReason::HeadStarved => "HEAD_STARVED",
            BlockReason::ModifierStarved => "MODIFIER_STARVED",
        })
    }
}

/// Number of scenarios discarded by each blocking rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardCounts {
    pub inconsistent: u64,
    pub trivial: u64,
    pub head_starved: u64,
    pub modifier_starved: u64,
}

impl DiscardCounts {
    fn record(&mut self, reason: BlockReason) {
        match reason {
            BlockReason::Inconsistent => self.inconsistent += 1,
            BlockReason::Trivial => self.trivial += 1,
            BlockReason::HeadStarved => self.head_starved += 1,
            BlockReason::ModifierStarved => self.modifier_starved += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.inconsistent + self.trivial + self.head_starved + self.modifier_starved
    }
}

impl fmt::Display for DiscardCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inconsistent={} trivial={} head_starved={} modifier_starved={}",
            self.inconsistent, self.trivial, self.head_starved, self.modifier_starved
        )
    }
}

#[derive(Debug, Clone)]
pub struct CombinationRequest<'a> {
    pub head: &'a Prototype,
    pub modifier: &'a Prototype,
    pub oppositions: &'a OppositionTable,
    pub max_features: usize,
}

impl<'a> CombinationRequest<'a> {
    pub fn new(head: &'a Prototype, modifier: &'a Prototype, oppositions: &'a OppositionTable) -> Self {
        Self { head, modifier, oppositions, max_features: DEFAULT_MAX_FEATURES }
    }

    pub fn max_features(mut self, max_features: usize) -> Self {
        self.max_features = max_features;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationResult {
    pub compound: Prototype,
    pub pool: Vec<TypicalityInclusion>,
    pub winning_scenario: Scenario,
    pub discarded: DiscardCounts,
}

fn pool_order(a: &TypicalityInclusion, b: &TypicalityInclusion) -> Ordering {
    b.probability
        .total_cmp(&a.probability)
        .then_with(|| a.feature.cmp(&b.feature))
}

/// One inclusion per distinct typical term of either parent. A term shared
/// by both parents is tagged `BOTH` and takes the HEAD's probability.
pub fn build_inclusion_pool(head: &Prototype, modifier: &Prototype) -> Vec<TypicalityInclusion> {
    let mut pool: Vec<TypicalityInclusion> = head
        .typical()
        .iter()
        .map(|f| TypicalityInclusion {
            subject: head.name().to_string(),
            feature: f.term.clone(),
            probability: f.p.get(),
            parent: if modifier.has_typical(&f.term) { ParentTag::Both } else { ParentTag::Head },
        })
        .collect();
    pool.extend(modifier.typical().iter().filter(|f| !head.has_typical(&f.term)).map(|f| {
        TypicalityInclusion {
            subject: modifier.name().to_string(),
            feature: f.term.clone(),
            probability: f.p.get(),
            parent: ParentTag::Modifier,
        }
    }));
    pool.sort_by(pool_order);
    pool
}

fn mask_probability(probabilities: &[f64], mask: u32) -> f64 {
    probabilities
        .iter()
        .enumerate()
        .map(|(i, p)| if mask & (1 << i) != 0 { *p } else { 1.0 - *p })
        .product()
}

/// Product of `p` over kept inclusions and `1 - p` over the rest.
pub fn scenario_probability(pool: &[TypicalityInclusion], kept: &[usize]) -> f64 {
    pool.iter()
        .enumerate()
        .map(|(i, inc)| if kept.contains(&i) { inc.probability } else { 1.0 - inc.probability })
        .product()
}

fn kept_lex(a: &[usize], b: &[usize]) -> Ordering {
    a.cmp(b)
}

/// All `2^n` scenarios, most probable first; ties by kept set.
pub fn enumerate_scenarios(pool: &[TypicalityInclusion]) -> Result<Vec<Scenario>, CombineError> {
    let n = pool.len();
    if n > MAX_POOL {
        return Err(CombineError::PoolTooLarge(n));
    }
    let probabilities: Vec<f64> = pool.iter().map(|i| i.probability).collect();
    let mut out: Vec<Scenario> = (0..1u32 << n)
        .map(|mask| Scenario::from_mask(mask, n, mask_probability(&probabilities, mask)))
        .collect();
    out.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| kept_lex(&a.kept, &b.kept))
    });
    Ok(out)
}

/// Terms of the pool, the pool-wide rigid set and the opposition table,
/// pre-digested into bitmasks.
struct BlockingContext {
    n: usize,
    /// `opposed[i]`: pool indices opposed to inclusion `i`.
    opposed: Vec<u32>,
    /// Inclusions opposing some rigid property.
    rigid_clash: u32,
    head_mask: u32,
    modifier_mask: u32,
}

impl BlockingContext {
    fn new(pool: &[TypicalityInclusion], rigid: &BTreeSet<String>, oppositions: &OppositionTable) -> Self {
        let n = pool.len();
        let mut opposed = vec![0u32; n];
        let mut rigid_clash = 0;
        let mut head_mask = 0;
        let mut modifier_mask = 0;
        for (i, a) in pool.iter().enumerate() {
            for (j, b) in pool.iter().enumerate() {
                if i != j && oppositions.opposed(&a.feature, &b.feature) {
                    opposed[i] |= 1 << j;
                }
            }
            if rigid.iter().any(|r| oppositions.opposed(&a.feature, r)) {
                rigid_clash |= 1 << i;
            }
            if a.parent.from_head() {
                head_mask |= 1 << i;
            }
            if a.parent.from_modifier() {
                modifier_mask |= 1 << i;
            }
        }
        Self { n, opposed, rigid_clash, head_mask, modifier_mask }
    }

    fn full(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    fn check(&self, mask: u32) -> Option<BlockReason> {
        let inconsistent = mask & self.rigid_clash != 0
            || (0..self.n).any(|i| mask & (1 << i) != 0 && mask & self.opposed[i] != 0);
        if inconsistent {
            Some(BlockReason::Inconsistent)
        } else if mask == self.full() {
            Some(BlockReason::Trivial)
        } else if mask & self.head_mask == 0 {
            Some(BlockReason::HeadStarved)
        } else if mask & self.modifier_mask == 0 {
            Some(BlockReason::ModifierStarved)
        } else {
            None
        }
    }
}

fn mask_of(kept: &[usize]) -> u32 {
    kept.iter().fold(0, |m, i| m | (1 << i))
}

/// First blocking rule that applies to the scenario, in the order
/// INCONSISTENT, TRIVIAL, HEAD_STARVED, MODIFIER_STARVED.
pub fn is_blocked(
    scenario: &Scenario,
    pool: &[TypicalityInclusion],
    rigid: &BTreeSet<String>,
    oppositions: &OppositionTable,
) -> Option<BlockReason> {
    assert!(pool.len() <= 32, "pool too large for blocking check");
    BlockingContext::new(pool, rigid, oppositions).check(mask_of(&scenario.kept))
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Combines HEAD and MODIFIER into the compound `<head>-<modifier>`.
///
/// The winner is the most probable unblocked scenario; ties go to the
/// scenario keeping more HEAD-sourced features, then to the smaller kept set
/// in lexicographic order. Its features are truncated to `max_features` in
/// canonical order.
pub fn combine_concepts(request: &CombinationRequest<'_>) -> Result<CombinationResult, CombineError> {
    let CombinationRequest { head, modifier, oppositions, max_features } = *request;
    let rigid: BTreeSet<String> = head.rigid().union(modifier.rigid()).cloned().collect();
    let pool = build_inclusion_pool(head, modifier);
    if pool.len() > MAX_POOL {
        return Err(CombineError::PoolTooLarge(pool.len()));
    }

    let ctx = BlockingContext::new(&pool, &rigid, oppositions);
    let probabilities: Vec<f64> = pool.iter().map(|i| i.probability).collect();
    let mut discarded = DiscardCounts::default();
    let mut best: Option<(u32, f64, u32)> = None;
    for mask in 0..=ctx.full() {
        if let Some(reason) = ctx.check(mask) {
            discarded.record(reason);
            continue;
        }
        let p = mask_probability(&probabilities, mask);
        let head_count = (mask & ctx.head_mask).count_ones();
        let better = match best {
            None => true,
            Some((best_mask, best_p, best_heads)) => {
                if !ties(p, best_p) {
                    p > best_p
                } else if head_count != best_heads {
                    head_count > best_heads
                } else {
                    let kept: Vec<usize> = (0..ctx.n).filter(|i| mask & (1 << i) != 0).collect();
                    let best_kept: Vec<usize> =
                        (0..ctx.n).filter(|i| best_mask & (1 << i) != 0).collect();
                    kept_lex(&kept, &best_kept) == Ordering::Less
                }
            }
        };
        if better {
            best = Some((mask, p, head_count));
        }
    }

    let Some((mask, probability, _)) = best else {
        return Err(CombineError::NoAdmissibleScenario {
            head: head.name().to_string(),
            modifier: modifier.name().to_string(),
            discarded,
        });
    };
    let winning_scenario = Scenario::from_mask(mask, pool.len(), probability);
    let mut features: Vec<Feature> = winning_scenario
        .kept
        .iter()
        .map(|&i| Feature { term: pool[i].feature.clone(), p: Probability::new(pool[i].probability).expect("pooled from valid prototypes") })
        .collect();
    // a kept term that is rigid in the other parent stays rigid only
    features.retain(|f| !rigid.contains(&f.term));
    features.sort_by(canonical_order);
    features.truncate(max_features);

    let compound = Prototype::compound(
        format!("{}-{}", head.name(), modifier.name()),
        Parents { head: head.name().to_string(), modifier: modifier.name().to_string() },
        rigid,
        features,
        max_features,
    )?;
    Ok(CombinationResult { compound, pool, winning_scenario, discarded })
}

/// A pairing that produced no compound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationFailure {
    pub head: String,
    pub modifier: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompoundCatalog {
    /// Sorted by compound name.
    pub results: Vec<CombinationResult>,
    pub failures: Vec<CombinationFailure>,
}

/// Pairs each value prototype (HEAD) with every emotion prototype the
/// moral-emotion mapping associates with its pole, and combines them.
///
/// Value prototypes must be named by their pole label. Pairs that admit no
/// scenario, and value prototypes with unknown names, are recorded as
/// failures.
pub fn build_compound_catalog(
    values: &[Prototype],
    emotions: &[Prototype],
    oppositions: &OppositionTable,
    max_features: usize,
) -> CompoundCatalog {
    let by_name: BTreeMap<&str, &Prototype> = emotions.iter().map(|e| (e.name(), e)).collect();
    let mut results: BTreeMap<String, CombinationResult> = BTreeMap::new();
    let mut failures = Vec::new();
    if emotions.is_empty() {
        return CompoundCatalog::default();
    }
    for head in values {
        let pole = match ValuePole::from_label(head.name()) {
            Ok(pole) if head.kind() == PrototypeKind::Value => pole,
            Ok(_) | Err(_) => {
                failures.push(CombinationFailure {
                    head: head.name().to_string(),
                    modifier: String::new(),
                    reason: format!("{:?} is not a value-pole prototype", head.name()),
                });
                continue;
            }
        };
        for emotion in plutchik_for_value_pole(pole) {
            let Some(modifier) = by_name.get(emotion.label()) else { continue };
            let request = CombinationRequest::new(head, modifier, oppositions).max_features(max_features);
            match combine_concepts(&request) {
                Ok(result) => {
                    results.entry(result.compound.name().to_string()).or_insert(result);
                }
                Err(e) => failures.push(CombinationFailure {
                    head: head.name().to_string(),
                    modifier: modifier.name().to_string(),
                    reason: e.to_string(),
                }),
            }
        }
    }
    CompoundCatalog { results: results.into_values().collect(), failures }
}

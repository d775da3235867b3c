//! Brute-force reference for concept combination, written against the rule
//! text rather than the library: string sets instead of bitmasks, recursive
//! enumeration instead of counting, and its own blocking predicate.
//!
//! Also hosts a seeded generator of random combination requests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hyval_core::kb::{Feature, OppositionTable, Prototype, PrototypeKind};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct OracleParent {
    pub typical: Vec<(String, f64)>,
    pub rigid: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct OracleRequest {
    pub head: OracleParent,
    pub modifier: OracleParent,
    pub opposed: Vec<(String, String)>,
    pub max_features: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleWinner {
    /// Terms kept by the best scenario.
    pub kept: BTreeSet<String>,
    pub probability: f64,
    /// Final compound features, (term, p) in descending p then term.
    pub typical: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
struct Entry {
    term: String,
    p: f64,
    from_head: bool,
    from_modifier: bool,
}

fn pool(req: &OracleRequest) -> Vec<Entry> {
    let mut merged: BTreeMap<String, Entry> = BTreeMap::new();
    for (t, p) in &req.modifier.typical {
        merged.insert(t.clone(), Entry { term: t.clone(), p: *p, from_head: false, from_modifier: true });
    }
    for (t, p) in &req.head.typical {
        let shared = merged.contains_key(t);
        // the HEAD's probability wins for shared terms
        merged.insert(t.clone(), Entry { term: t.clone(), p: *p, from_head: true, from_modifier: shared });
    }
    let mut entries: Vec<Entry> = merged.into_values().collect();
    entries.sort_by(|a, b| b.p.partial_cmp(&a.p).unwrap().then(a.term.cmp(&b.term)));
    entries
}

fn blocked(entries: &[Entry], kept: &[bool], rigid: &BTreeSet<String>, pairs: &[(String, String)]) -> bool {
    let chosen: BTreeSet<&str> =
        entries.iter().zip(kept).filter(|(_, k)| **k).map(|(e, _)| e.term.as_str()).collect();
    let clash = |x: &str, y: &str| chosen.contains(x) && (chosen.contains(y) || rigid.contains(y));
    if pairs.iter().any(|(a, b)| clash(a, b) || clash(b, a)) {
        return true;
    }
    let any = |f: fn(&Entry) -> bool| entries.iter().zip(kept).any(|(e, k)| *k && f(e));
    chosen.len() == entries.len() || !any(|e| e.from_head) || !any(|e| e.from_modifier)
}

struct Best {
    kept: Vec<bool>,
    probability: f64,
}

fn heads(entries: &[Entry], kept: &[bool]) -> usize {
    entries.iter().zip(kept).filter(|(e, k)| **k && e.from_head).count()
}

fn indices(kept: &[bool]) -> Vec<usize> {
    kept.iter().enumerate().filter(|(_, k)| **k).map(|(i, _)| i).collect()
}

fn beats(entries: &[Entry], kept: &[bool], p: f64, best: &Best) -> bool {
    let scale = p.abs().max(best.probability.abs());
    if (p - best.probability).abs() > 1e-12 * scale {
        return p > best.probability;
    }
    let (h, bh) = (heads(entries, kept), heads(entries, &best.kept));
    if h != bh {
        return h > bh;
    }
    indices(kept) < indices(&best.kept)
}

fn walk(
    entries: &[Entry],
    i: usize,
    kept: &mut Vec<bool>,
    p: f64,
    rigid: &BTreeSet<String>,
    pairs: &[(String, String)],
    best: &mut Option<Best>,
) {
    if i == entries.len() {
        if blocked(entries, kept, rigid, pairs) {
            return;
        }
        let better = match best {
            None => true,
            Some(b) => beats(entries, kept, p, b),
        };
        if better {
            *best = Some(Best { kept: kept.clone(), probability: p });
        }
        return;
    }
    kept.push(true);
    walk(entries, i + 1, kept, p * entries[i].p, rigid, pairs, best);
    kept.pop();
    kept.push(false);
    walk(entries, i + 1, kept, p * (1.0 - entries[i].p), rigid, pairs, best);
    kept.pop();
}

/// Sum of all scenario probabilities for a list of inclusion probabilities.
pub fn total_mass(ps: &[f64]) -> f64 {
    fn go(ps: &[f64], acc: f64) -> f64 {
        match ps.split_first() {
            None => acc,
            Some((p, rest)) => go(rest, acc * p) + go(rest, acc * (1.0 - p)),
        }
    }
    go(ps, 1.0)
}

pub fn oracle_combine(req: &OracleRequest) -> Option<OracleWinner> {
    let entries = pool(req);
    let rigid: BTreeSet<String> = req.head.rigid.iter().chain(&req.modifier.rigid).cloned().collect();
    let mut best = None;
    walk(&entries, 0, &mut Vec::new(), 1.0, &rigid, &req.opposed, &mut best);
    let best = best?;
    let kept: Vec<&Entry> = entries.iter().zip(&best.kept).filter(|(_, k)| **k).map(|(e, _)| e).collect();
    let mut typical: Vec<(String, f64)> =
        kept.iter().filter(|e| !rigid.contains(&e.term)).map(|e| (e.term.clone(), e.p)).collect();
    typical.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    typical.truncate(req.max_features);
    Some(OracleWinner {
        kept: kept.iter().map(|e| e.term.clone()).collect(),
        probability: best.probability,
        typical,
    })
}

impl OracleRequest {
    fn parent(&self, head: bool) -> Prototype {
        let (name, kind, parent) = if head {
            ("head", PrototypeKind::Value, &self.head)
        } else {
            ("modifier", PrototypeKind::Emotion, &self.modifier)
        };
        let typical = parent.typical.iter().map(|(t, p)| Feature::new(t.clone(), *p).unwrap()).collect();
        Prototype::basic(name, kind, parent.rigid.clone(), typical).unwrap()
    }

    pub fn head_prototype(&self) -> Prototype {
        self.parent(true)
    }

    pub fn modifier_prototype(&self) -> Prototype {
        self.parent(false)
    }

    pub fn table(&self) -> OppositionTable {
        OppositionTable::from_pairs(self.opposed.iter().map(|(a, b)| (a.clone(), b.clone()))).unwrap()
    }
}

/// Probability in (0.5, 1]. Half the draws come from a coarse grid so that
/// exact ties between scenarios actually happen.
pub fn random_probability<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        *[0.6, 0.7, 0.75, 0.8, 0.9, 1.0].choose(rng).unwrap()
    } else {
        loop {
            let p: f64 = rng.gen_range(0.5..=1.0);
            if p > 0.5 {
                return p;
            }
        }
    }
}

/// Random request whose merged pool has at most `max_pool` terms. Parents
/// overlap, carry rigid properties now and then, and the opposition table
/// is drawn over the whole vocabulary.
pub fn random_request<R: Rng>(rng: &mut R, max_pool: usize) -> OracleRequest {
    assert!(max_pool >= 2);
    let vocab: Vec<String> = (0..24).map(|i| format!("t{i:02}")).collect();
    let pool_size = rng.gen_range(2..=max_pool);
    let mut terms = vocab.clone();
    terms.shuffle(rng);
    let pool_terms = &terms[..pool_size];

    let mut head_terms = Vec::new();
    let mut modifier_terms = Vec::new();
    for t in pool_terms {
        match rng.gen_range(0..5) {
            0 => {
                head_terms.push(t.clone());
                modifier_terms.push(t.clone());
            }
            1 | 2 => head_terms.push(t.clone()),
            _ => modifier_terms.push(t.clone()),
        }
    }
    if head_terms.is_empty() {
        head_terms.push(modifier_terms.pop().unwrap());
    }
    if modifier_terms.is_empty() {
        modifier_terms.push(head_terms.pop().unwrap());
    }

    let spare: Vec<&String> = terms[pool_size..].iter().collect();
    let mut rigid_for = |own: &[String]| -> Vec<String> {
        let mut rigid = Vec::new();
        if rng.gen_bool(0.25) {
            for _ in 0..rng.gen_range(1..=2) {
                // a spare term, or now and then a term typical in the other parent
                let candidate = if rng.gen_bool(0.7) {
                    (*spare.choose(rng).unwrap()).clone()
                } else {
                    pool_terms.choose(rng).unwrap().clone()
                };
                if !own.contains(&candidate) && !rigid.contains(&candidate) {
                    rigid.push(candidate);
                }
            }
        }
        rigid
    };
    let head_rigid = rigid_for(&head_terms);
    let modifier_rigid = rigid_for(&modifier_terms);

    let density = rng.gen_range(0.0..0.15);
    let mut opposed = Vec::new();
    for i in 0..vocab.len() {
        for j in i + 1..vocab.len() {
            if rng.gen_bool(density) {
                opposed.push((vocab[i].clone(), vocab[j].clone()));
            }
        }
    }

    let max_features = rng.gen_range(1..=9);
    let mut typical = |terms: Vec<String>| terms.into_iter().map(|t| (t, random_probability(rng))).collect();
    OracleRequest {
        head: OracleParent { typical: typical(head_terms), rigid: head_rigid },
        modifier: OracleParent { typical: typical(modifier_terms), rigid: modifier_rigid },
        opposed,
        max_features,
    }
}

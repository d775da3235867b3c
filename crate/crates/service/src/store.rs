//! Catalog store: immutable snapshots swapped by a single writer, optionally
//! backed by append-only JSON-lines files.
//!
//! Layout of a store directory:
//!
//! * `items.jsonl`: one [`CulturalItem`] per line; a later line for the same
//!   id replaces the earlier one.
//! * `classifications.jsonl`: one [`StoredClassification`] per line, same
//!   replacement rule.
//!
//! On open, records are replayed; classifications made under a different
//! bundle hash are recomputed and appended.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use hyval_core::classify::Classification;
use hyval_core::report::{classify_one, Report, Unclassified, NO_MATCH};
use hyval_core::text::CulturalItem;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::ActiveBundle;

const ITEMS_FILE: &str = "items.jsonl";
const CLASSIFICATIONS_FILE: &str = "classifications.jsonl";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {source}", path.display())]
    Record {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}:{line}: classification for unknown item {item_id:?}", path.display())]
    Orphan { path: PathBuf, line: usize, item_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredClassification {
    pub item_id: String,
    pub bundle_sha256: String,
    pub labels: Vec<String>,
    pub explanations: Vec<hyval_core::classify::Explanation>,
    /// Why the item has no label, when it has none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl StoredClassification {
    fn compute(item: &CulturalItem, bundle: &ActiveBundle) -> Self {
        let (c, reason) = match classify_one(item, &bundle.kb, &bundle.config) {
            Ok(c) => {
                let reason = (!c.is_labeled()).then(|| NO_MATCH.to_string());
                (c, reason)
            }
            Err(u) => (Classification::unlabeled(&item.id), Some(u.reason)),
        };
        Self {
            item_id: c.item_id,
            bundle_sha256: bundle.hash.clone(),
            labels: c.labels,
            explanations: c.explanations,
            reason,
        }
    }

    pub fn classification(&self) -> Classification {
        Classification {
            item_id: self.item_id.clone(),
            labels: self.labels.clone(),
            explanations: self.explanations.clone(),
        }
    }
}

/// What readers see. Never mutated once published.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub bundle: Arc<ActiveBundle>,
    pub items: BTreeMap<String, CulturalItem>,
    pub classifications: BTreeMap<String, StoredClassification>,
}

impl Snapshot {
    /// Classifications of every item, in id order.
    pub fn classification_list(&self) -> Vec<Classification> {
        self.classifications.values().map(StoredClassification::classification).collect()
    }

    /// The stored catalog as a classification report.
    pub fn report(&self) -> Report {
        let mut classifications = Vec::new();
        let mut unclassified = Vec::new();
        for stored in self.classifications.values() {
            if let Some(reason) = &stored.reason {
                unclassified.push(Unclassified { item_id: stored.item_id.clone(), reason: reason.clone() });
            }
            if stored.reason.as_deref() != Some(hyval_core::report::EMPTY_PROFILE) {
                classifications.push(stored.classification());
            }
        }
        Report::assemble(&self.bundle.hash, &self.bundle.config, self.items.len(), classifications, unclassified)
    }
}

/// Outcome of an ingestion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub ingested: usize,
    /// Items identical to the stored version; nothing was written for them.
    pub unchanged: usize,
    pub classified: usize,
    pub unclassified: usize,
}

#[derive(Debug)]
struct Journal {
    dir: PathBuf,
}

impl Journal {
    fn append<T: Serialize>(&self, file: &str, records: &[T]) -> Result<(), StoreError> {
        if records.is_empty() {
            return Ok(());
        }
        let path = self.dir.join(file);
        let io = |source| StoreError::Io { path: path.clone(), source };
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(r).expect("records serialize"));
            buf.push('\n');
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        f.write_all(buf.as_bytes()).map_err(io)?;
        f.sync_data().map_err(io)
    }
}

fn replay<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>, StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(StoreError::Io { path: path.to_owned(), source }),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| StoreError::Io { path: path.to_owned(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| StoreError::Record { path: path.to_owned(), line: i + 1, source })?;
        out.push((i + 1, record));
    }
    Ok(out)
}

/// Readers clone the current `Arc<Snapshot>`; the writer lock serializes
/// ingestion and bundle swaps, and the read lock is held only for the
/// pointer swap.
#[derive(Debug)]
pub struct CatalogStore {
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<Option<Journal>>,
}

impl CatalogStore {
    pub fn in_memory(bundle: ActiveBundle) -> Self {
        let snapshot = Snapshot { bundle: Arc::new(bundle), items: BTreeMap::new(), classifications: BTreeMap::new() };
        Self { current: RwLock::new(Arc::new(snapshot)), writer: Mutex::new(None) }
    }

    /// Opens (or creates) a store directory and brings every stored
    /// classification up to date with `bundle`.
    pub fn open(dir: &Path, bundle: ActiveBundle) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(|source| StoreError::Io { path: dir.to_owned(), source })?;
        let journal = Journal { dir: dir.to_owned() };
        let bundle = Arc::new(bundle);

        let mut items = BTreeMap::new();
        for (_, item) in replay::<CulturalItem>(&dir.join(ITEMS_FILE))? {
            items.insert(item.id.clone(), item);
        }
        let path = dir.join(CLASSIFICATIONS_FILE);
        let mut classifications = BTreeMap::new();
        for (line, c) in replay::<StoredClassification>(&path)? {
            if !items.contains_key(&c.item_id) {
                return Err(StoreError::Orphan { path, line, item_id: c.item_id });
            }
            classifications.insert(c.item_id.clone(), c);
        }

        let stale: Vec<StoredClassification> = items
            .values()
            .filter(|item| classifications.get(&item.id).is_none_or(|c| c.bundle_sha256 != bundle.hash))
            .map(|item| StoredClassification::compute(item, &bundle))
            .collect();
        journal.append(CLASSIFICATIONS_FILE, &stale)?;
        for c in stale {
            classifications.insert(c.item_id.clone(), c);
        }

        let snapshot = Snapshot { bundle, items, classifications };
        Ok(Self { current: RwLock::new(Arc::new(snapshot)), writer: Mutex::new(Some(journal)) })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    fn publish(&self, snapshot: Snapshot) {
        *self.current.write().expect("snapshot lock poisoned") = Arc::new(snapshot);
    }

    /// Adds or replaces items, classifying them with the active bundle.
    pub fn ingest(&self, items: Vec<CulturalItem>) -> Result<IngestSummary, StoreError> {
        let journal = self.writer.lock().expect("writer lock poisoned");
        let base = self.snapshot();
        let mut next = (*base).clone();
        let mut summary = IngestSummary::default();
        let mut new_items = Vec::new();
        let mut new_classifications = Vec::new();
        for item in items {
            let stored = StoredClassification::compute(&item, &next.bundle);
            if stored.labels.is_empty() {
                summary.unclassified += 1;
            } else {
                summary.classified += 1;
            }
            let unchanged = next.items.get(&item.id) == Some(&item)
                && next.classifications.get(&item.id) == Some(&stored);
            if unchanged {
                summary.unchanged += 1;
                continue;
            }
            summary.ingested += 1;
            next.items.insert(item.id.clone(), item.clone());
            next.classifications.insert(item.id.clone(), stored.clone());
            new_items.push(item);
            new_classifications.push(stored);
        }
        if let Some(j) = journal.as_ref() {
            j.append(ITEMS_FILE, &new_items)?;
            j.append(CLASSIFICATIONS_FILE, &new_classifications)?;
        }
        self.publish(next);
        Ok(summary)
    }

    /// Replaces the active bundle and reclassifies every item under it.
    pub fn swap_bundle(&self, bundle: ActiveBundle) -> Result<(), StoreError> {
        let journal = self.writer.lock().expect("writer lock poisoned");
        let base = self.snapshot();
        let bundle = Arc::new(bundle);
        let classifications: BTreeMap<String, StoredClassification> = base
            .items
            .values()
            .map(|item| (item.id.clone(), StoredClassification::compute(item, &bundle)))
            .collect();
        if let Some(j) = journal.as_ref() {
            let records: Vec<&StoredClassification> = classifications.values().collect();
            j.append(CLASSIFICATIONS_FILE, &records)?;
        }
        self.publish(Snapshot { bundle, items: base.items.clone(), classifications });
        Ok(())
    }
}

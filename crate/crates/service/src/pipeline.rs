//! File-level operations behind the CLI: build a bundle, classify a catalog,
//! recommend from a report.

use std::fs;
use std::path::{Path, PathBuf};

use hyval_core::bundle::{build_bundle, content_hash, Bundle, BundleError, BuildConfig};
use hyval_core::classify::{Classification, ClassifierConfig};
use hyval_core::kb::KnowledgeBase;
use hyval_core::recommend::{opposite_items, similar_items, Mode, Recommendation, RecommendError};
use hyval_core::report::{classify_catalog as classify_parsed, parse_catalog, CatalogError, Report};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Bundle {
        path: PathBuf,
        #[source]
        source: BundleError,
    },
    #[error("{}: {source}", path.display())]
    Catalog {
        path: PathBuf,
        #[source]
        source: CatalogError,
    },
    #[error("{}: malformed report: {source}", path.display())]
    Report {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(|source| PipelineError::Io { path: path.to_owned(), source })
}

/// A validated bundle ready for classification.
#[derive(Debug, Clone)]
pub struct ActiveBundle {
    pub bundle: Bundle,
    pub kb: KnowledgeBase,
    pub config: ClassifierConfig,
    /// sha256 of the bundle file as read.
    pub hash: String,
}

impl ActiveBundle {
    pub fn from_json(text: &str) -> Result<Self, BundleError> {
        let bundle = Bundle::from_json(text)?;
        let kb = bundle.knowledge_base()?;
        let config = bundle.classifier_config()?;
        Ok(Self { bundle, kb, config, hash: content_hash(text) })
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Self::from_json(&read(path)?).map_err(|source| PipelineError::Bundle { path: path.to_owned(), source })
    }
}

#[derive(Debug, Clone)]
pub struct BuildPaths<'a> {
    pub emotions: &'a Path,
    pub values: &'a Path,
    pub oppositions: Option<&'a Path>,
    pub out: &'a Path,
}

/// Builds the bundle and writes it. Returns the bundle and its file hash.
pub fn build_prototypes(paths: &BuildPaths<'_>, config: &BuildConfig) -> Result<(Bundle, String), PipelineError> {
    let emotions = read(paths.emotions)?;
    let values = read(paths.values)?;
    let oppositions = paths.oppositions.map(read).transpose()?;
    let bundle = build_bundle(&emotions, &values, oppositions.as_deref(), config).map_err(|e| {
        // point lexicon errors at the offending file
        let path = match &e {
            BundleError::Lexicon { file, .. } if file.starts_with("value") => paths.values,
            BundleError::Lexicon { .. } => paths.emotions,
            BundleError::Oppositions { .. } => paths.oppositions.unwrap_or(paths.out),
            _ => paths.out,
        };
        PipelineError::Bundle { path: path.to_owned(), source: e }
    })?;
    let text = bundle.to_json();
    write(paths.out, &text)?;
    Ok((bundle, content_hash(&text)))
}

pub fn classify_catalog(catalog: &Path, bundle: &Path, out: &Path) -> Result<Report, PipelineError> {
    let active = ActiveBundle::load(bundle)?;
    let parsed = parse_catalog(&read(catalog)?)
        .map_err(|source| PipelineError::Catalog { path: catalog.to_owned(), source })?;
    let report = classify_parsed(&parsed, &active.kb, &active.config, &active.hash);
    write(out, &report.to_json())?;
    Ok(report)
}

pub fn load_report(path: &Path) -> Result<Report, PipelineError> {
    serde_json::from_str(&read(path)?).map_err(|source| PipelineError::Report { path: path.to_owned(), source })
}

pub fn recommend(
    classifications: &[Classification],
    item: &str,
    mode: Mode,
    limit: usize,
    emotion_contrast: bool,
) -> Result<Recommendation, PipelineError> {
    let seed = classifications
        .iter()
        .find(|c| c.item_id == item)
        .ok_or_else(|| PipelineError::UnknownItem(item.to_string()))?;
    Ok(match mode {
        Mode::Similar => similar_items(seed, classifications, limit)?,
        Mode::Opposite => opposite_items(seed, classifications, limit, emotion_contrast)?,
    })
}

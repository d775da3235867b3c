use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use hyval::api;
use hyval::pipeline::{self, ActiveBundle, BuildPaths, PipelineError};
use hyval::store::CatalogStore;
use hyval_core::bundle::BuildConfig;
use hyval_core::classify::DEFAULT_THRESHOLD;
use hyval_core::kb::DEFAULT_MAX_FEATURES;
use hyval_core::lexicon::DEFAULT_K;
use hyval_core::mapping::export_records;
use hyval_core::recommend::{Mode, RecommendError};
use hyval_core::report::{classify_catalog, parse_catalog, EMPTY_PROFILE, UNREADABLE};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "hyval", version, about = "Value/emotion prototypes for cultural items")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build value, emotion and compound prototypes from two lexicons.
    BuildPrototypes {
        #[arg(long)]
        emotions: PathBuf,
        #[arg(long)]
        values: PathBuf,
        /// Extra opposed term pairs, one tab-separated pair per line.
        #[arg(long)]
        oppositions: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_FEATURES)]
        max_features: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a catalog against a bundle and write the report.
    Classify {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank items similar to, or value-opposite from, one item.
    Recommend {
        #[arg(long)]
        item: String,
        #[arg(long)]
        mode: Mode,
        /// A report written by `classify`.
        #[arg(long, required_unless_present_all = ["catalog", "bundle"], conflicts_with_all = ["catalog", "bundle"])]
        report: Option<PathBuf>,
        /// Classify this catalog on the fly instead of reading a report.
        #[arg(long, requires = "bundle")]
        catalog: Option<PathBuf>,
        #[arg(long, requires = "catalog")]
        bundle: Option<PathBuf>,
        #[arg(long, default_value_t = api::DEFAULT_LIMIT)]
        limit: usize,
        /// Order equal opposite scores by emotion-wheel contrast.
        #[arg(long)]
        emotion_contrast: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        bind: SocketAddr,
        #[arg(long)]
        bundle: PathBuf,
        /// Catalog to ingest at startup.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Directory for the persistent store; in memory when absent.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Print the moral-emotion mapping table as JSON.
    ExportMapping {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{0}")]
    Data(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::BuildPrototypes { emotions, values, oppositions, k, max_features, threshold, out } => {
            let paths = BuildPaths { emotions: &emotions, values: &values, oppositions: oppositions.as_deref(), out: &out };
            let (bundle, hash) = pipeline::build_prototypes(&paths, &BuildConfig { k, max_features, threshold })?;
            let compounds = bundle.prototypes.iter().filter(|(_, e)| e.parents.is_some()).count();
            println!("wrote {} ({} prototypes, {compounds} compounds) sha256 {hash}", out.display(), bundle.prototypes.len());
        }
        Command::Classify { catalog, bundle, out } => {
            let report = pipeline::classify_catalog(&catalog, &bundle, &out)?;
            for u in report.unclassified.iter().filter(|u| u.reason == UNREADABLE) {
                eprintln!("warning: item {:?}: {}", u.item_id, u.reason);
            }
            println!(
                "classified {} of {} items; report {}",
                report.summary.classified,
                report.summary.items,
                out.display()
            );
        }
        Command::Recommend { item, mode, report, catalog, bundle, limit, emotion_contrast } => {
            let report = match (report, catalog, bundle) {
                (Some(path), _, _) => pipeline::load_report(&path)?,
                (None, Some(catalog), Some(bundle)) => {
                    let active = ActiveBundle::load(&bundle)?;
                    let text = std::fs::read_to_string(&catalog)
                        .map_err(|source| PipelineError::Io { path: catalog.clone(), source })?;
                    let parsed = parse_catalog(&text)
                        .map_err(|source| PipelineError::Catalog { path: catalog.clone(), source })?;
                    classify_catalog(&parsed, &active.kb, &active.config, &active.hash)
                }
                _ => unreachable!("clap enforces --report or --catalog with --bundle"),
            };
            if report.unclassified.iter().any(|u| u.item_id == item && u.reason == EMPTY_PROFILE) {
                return Err(PipelineError::from(RecommendError::UnclassifiableSeed(item)).into());
            }
            let rec = pipeline::recommend(&report.classifications, &item, mode, limit, emotion_contrast)?;
            print!("{}", to_json(&rec));
        }
        Command::Serve { bind, bundle, catalog, store } => {
            let active = ActiveBundle::load(&bundle)?;
            let store = match store {
                Some(dir) => CatalogStore::open(&dir, active).map_err(|e| CliError::Data(e.to_string()))?,
                None => CatalogStore::in_memory(active),
            };
            if let Some(path) = catalog {
                let text = std::fs::read_to_string(&path)
                    .map_err(|source| PipelineError::Io { path: path.clone(), source })?;
                let parsed =
                    parse_catalog(&text).map_err(|source| PipelineError::Catalog { path: path.clone(), source })?;
                for u in &parsed.unreadable {
                    eprintln!("warning: item {:?}: {}", u.item_id, u.reason);
                }
                let summary = store.ingest(parsed.items).map_err(|e| CliError::Data(e.to_string()))?;
                eprintln!("ingested {} items ({} unchanged)", summary.ingested, summary.unchanged);
            }
            serve(bind, Arc::new(store))?;
        }
        Command::ExportMapping { out } => {
            let text = to_json(&export_records());
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|source| PipelineError::Io { path, source })?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn serve(bind: SocketAddr, store: Arc<CatalogStore>) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Data(format!("runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| CliError::Data(format!("cannot bind {bind}: {e}")))?;
        eprintln!("listening on {}", listener.local_addr().map(|a| a.to_string()).unwrap_or_default());
        axum::serve(listener, api::router(store))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Data(format!("server: {e}")))
    })
}

//! The `/v1` HTTP JSON API.
//!
//! Errors are JSON objects `{"error": <code>, "message": <text>}` with codes
//! `malformed_request` (400), `not_found` (404), `unclassifiable_seed` (422)
//! and `storage` (500).

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hyval_core::bundle::BundleEntry;
use hyval_core::classify::Classification;
use hyval_core::kb::PrototypeKind;
use hyval_core::recommend::{opposite_items, similar_items, RecommendError};
use hyval_core::report::{classify_catalog, parse_catalog_value, CatalogError, Report};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::store::{CatalogStore, IngestSummary, StoreError};

pub const DEFAULT_LIMIT: usize = 10;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn malformed(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, code: "malformed_request", message: message.into() }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self { status: StatusCode::NOT_FOUND, code: "not_found", message: message.into() }
    }
}

impl From<CatalogError> for ApiError {
    fn from(e: CatalogError) -> Self {
        Self::malformed(e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        Self { status: StatusCode::INTERNAL_SERVER_ERROR, code: "storage", message: e.to_string() }
    }
}

impl From<RecommendError> for ApiError {
    fn from(e: RecommendError) -> Self {
        Self { status: StatusCode::UNPROCESSABLE_ENTITY, code: "unclassifiable_seed", message: e.to_string() }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::malformed(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type AppState = Arc<CatalogStore>;

pub fn router(store: Arc<CatalogStore>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/catalog", post(ingest))
        .route("/v1/classify", post(classify))
        .route("/v1/items/{id}", get(item))
        .route("/v1/items/{id}/classification", get(item_classification))
        .route("/v1/items/{id}/similar", get(similar))
        .route("/v1/items/{id}/opposite", get(opposite))
        .route("/v1/prototypes", get(prototypes))
        .route("/v1/prototypes/{name}", get(prototype))
        .with_state(store)
}

fn parse_body(body: &Bytes) -> Result<Value, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(json!({}));
    }
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(format!("invalid JSON body: {e}")))
}

async fn health(State(store): State<AppState>) -> Json<Value> {
    let snap = store.snapshot();
    Json(json!({
        "status": "ok",
        "bundle_sha256": snap.bundle.hash,
        "items": snap.items.len(),
    }))
}

#[derive(Debug, Serialize)]
struct IngestResponse {
    bundle_sha256: String,
    #[serde(flatten)]
    summary: IngestSummary,
    rejected: Vec<hyval_core::report::Unclassified>,
}

async fn ingest(State(store): State<AppState>, body: Bytes) -> ApiResult<IngestResponse> {
    let parsed = parse_catalog_value(parse_body(&body)?)?;
    let summary = store.ingest(parsed.items)?;
    Ok(Json(IngestResponse {
        bundle_sha256: store.snapshot().bundle.hash.clone(),
        summary,
        rejected: parsed.unreadable,
    }))
}

/// Inline items are classified without being stored; an empty body or `{}`
/// returns the report for the stored catalog.
async fn classify(State(store): State<AppState>, body: Bytes) -> ApiResult<Report> {
    let value = parse_body(&body)?;
    let snap = store.snapshot();
    if value.as_object().is_some_and(|o| o.is_empty()) {
        return Ok(Json(snap.report()));
    }
    let parsed = parse_catalog_value(value)?;
    Ok(Json(classify_catalog(&parsed, &snap.bundle.kb, &snap.bundle.config, &snap.bundle.hash)))
}

async fn item(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = store.snapshot();
    let item = snap.items.get(&id).ok_or_else(|| ApiError::not_found(format!("unknown item {id:?}")))?;
    Ok(Json(item).into_response())
}

async fn item_classification(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = store.snapshot();
    let c = snap.classifications.get(&id).ok_or_else(|| ApiError::not_found(format!("unknown item {id:?}")))?;
    Ok(Json(c).into_response())
}

#[derive(Debug, Deserialize)]
struct RecommendParams {
    limit: Option<usize>,
    #[serde(default)]
    emotion_contrast: bool,
}

fn seed_and_catalog(store: &CatalogStore, id: &str) -> Result<(Classification, Vec<Classification>), ApiError> {
    let snap = store.snapshot();
    let seed = snap
        .classifications
        .get(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown item {id:?}")))?
        .classification();
    Ok((seed, snap.classification_list()))
}

async fn similar(
    State(store): State<AppState>,
    Path(id): Path<String>,
    params: Result<Query<RecommendParams>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(params) = params?;
    let (seed, catalog) = seed_and_catalog(&store, &id)?;
    let rec = similar_items(&seed, &catalog, params.limit.unwrap_or(DEFAULT_LIMIT))?;
    Ok(Json(rec).into_response())
}

async fn opposite(
    State(store): State<AppState>,
    Path(id): Path<String>,
    params: Result<Query<RecommendParams>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(params) = params?;
    let (seed, catalog) = seed_and_catalog(&store, &id)?;
    let rec = opposite_items(&seed, &catalog, params.limit.unwrap_or(DEFAULT_LIMIT), params.emotion_contrast)?;
    Ok(Json(rec).into_response())
}

#[derive(Debug, Deserialize)]
struct PrototypeParams {
    kind: Option<PrototypeKind>,
}

#[derive(Debug, Serialize)]
struct PrototypeSummary<'a> {
    name: &'a str,
    kind: PrototypeKind,
    features: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    parents: Option<&'a hyval_core::kb::Parents>,
}

async fn prototypes(
    State(store): State<AppState>,
    params: Result<Query<PrototypeParams>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(params) = params?;
    let snap = store.snapshot();
    let list: Vec<PrototypeSummary> = snap
        .bundle
        .bundle
        .prototypes
        .iter()
        .filter(|(_, e)| params.kind.is_none_or(|k| e.kind == k))
        .map(|(name, e)| PrototypeSummary { name, kind: e.kind, features: e.typical.len(), parents: e.parents.as_ref() })
        .collect();
    Ok(Json(json!({ "bundle_sha256": snap.bundle.hash, "prototypes": list })).into_response())
}

#[derive(Debug, Serialize)]
struct PrototypeDetail<'a> {
    name: &'a str,
    #[serde(flatten)]
    entry: &'a BundleEntry,
}

async fn prototype(State(store): State<AppState>, Path(name): Path<String>) -> Result<Response, ApiError> {
    let snap = store.snapshot();
    let entry = snap
        .bundle
        .bundle
        .prototypes
        .get(&name)
        .ok_or_else(|| ApiError::not_found(format!("unknown prototype {name:?}")))?;
    Ok(Json(PrototypeDetail { name: &name, entry }).into_response())
}

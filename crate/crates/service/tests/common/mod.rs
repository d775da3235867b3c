#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use hyval::api::router;
use hyval::pipeline::ActiveBundle;
use hyval::store::CatalogStore;
use hyval_core::bundle::{build_bundle, BuildConfig};
use hyval_core::fixtures::{CATALOG, EMOTION_LEXICON, OPPOSITIONS, VALUE_LEXICON};
use hyval_core::report::parse_catalog;
use serde_json::Value;
use tower::ServiceExt;

pub fn fixture_bundle_json() -> String {
    build_bundle(EMOTION_LEXICON, VALUE_LEXICON, Some(OPPOSITIONS), &BuildConfig::default())
        .unwrap()
        .to_json()
}

pub fn fixture_bundle() -> ActiveBundle {
    ActiveBundle::from_json(&fixture_bundle_json()).unwrap()
}

/// In-memory store holding the fixture catalog.
pub fn fixture_store() -> Arc<CatalogStore> {
    let store = CatalogStore::in_memory(fixture_bundle());
    store.ingest(parse_catalog(CATALOG).unwrap().items).unwrap();
    Arc::new(store)
}

pub fn catalog_item(id: &str) -> Value {
    let catalog: Value = serde_json::from_str(CATALOG).unwrap();
    catalog["items"].as_array().unwrap().iter().find(|i| i["id"] == id).unwrap().clone()
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

pub fn app() -> Router {
    router(fixture_store())
}

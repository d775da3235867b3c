mod common;

use axum::http::StatusCode;
use common::{app, call, catalog_item, fixture_bundle};
use hyval::api::router;
use hyval::store::CatalogStore;
use serde_json::json;
use std::sync::Arc;

fn strings(v: &serde_json::Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn health_reports_the_bundle_hash() {
    let app = app();
    let (status, body) = call(&app, "GET", "/v1/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["bundle_sha256"], fixture_bundle().hash);
    assert_eq!(body["items"], 12);
}

#[tokio::test]
async fn inline_catapult_classification() {
    let app = app();
    let body = json!({ "items": [catalog_item("hecht-01")] }).to_string();
    let (status, report) = call(&app, "POST", "/v1/classify", Some(&body)).await;
    assert_eq!(status, StatusCode::OK);
    let c = &report["classifications"][0];
    assert_eq!(strings(&c["labels"]), ["degradation-disgust"]);
    let e = &c["explanations"][0];
    assert_eq!(strings(&e["matches"]), ["molestation", "weapon"]);
    assert_eq!(e["emotion"]["concept"], "disgust");
    assert_eq!(strings(&e["emotion"]["terms"]), ["molestation"]);
    assert_eq!(strings(&e["value"]["terms"]), ["weapon"]);
    assert_eq!(report["summary"]["items"], 1);
}

#[tokio::test]
async fn classify_without_items_reports_the_stored_catalog() {
    let app = app();
    for body in [None, Some("{}")] {
        let (status, report) = call(&app, "POST", "/v1/classify", body).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(report["summary"]["items"], 12);
        assert_eq!(report["summary"]["classified"], 5);
        assert_eq!(report["summary"]["label_histogram"]["degradation-disgust"], 2);
    }
}

#[tokio::test]
async fn malformed_bodies_are_rejected_with_a_reason() {
    let app = app();
    for body in ["{not json", "42", r#"{"items": [{"title": "no id"}]}"#, r#"{"items": "x"}"#] {
        for uri in ["/v1/classify", "/v1/catalog"] {
            let (status, err) = call(&app, "POST", uri, Some(body)).await;
            assert_eq!(status, StatusCode::BAD_REQUEST, "{uri} {body}");
            assert_eq!(err["error"], "malformed_request");
            assert!(err["message"].as_str().unwrap().len() > 5);
        }
    }
    let dup = json!({ "items": [catalog_item("hecht-01"), catalog_item("hecht-01")] }).to_string();
    let (status, err) = call(&app, "POST", "/v1/catalog", Some(&dup)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(err["message"].as_str().unwrap().contains("duplicate"));
}

#[tokio::test]
async fn items_and_classifications() {
    let app = app();
    let (status, item) = call(&app, "GET", "/v1/items/hecht-03", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(item["title"], "Bar Kochva Rebellion");
    let (status, c) = call(&app, "GET", "/v1/items/hecht-03/classification", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(strings(&c["labels"]), ["sanctity-awe"]);
    assert_eq!(c["bundle_sha256"], fixture_bundle().hash);
    let (_, c) = call(&app, "GET", "/v1/items/hecht-12/classification", None).await;
    assert_eq!(c["reason"], "no matching prototype");

    for uri in ["/v1/items/unknown-id", "/v1/items/unknown-id/classification", "/v1/items/unknown-id/similar"] {
        let (status, err) = call(&app, "GET", uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(err["error"], "not_found");
    }
}

#[tokio::test]
async fn similar_and_opposite_for_catapult() {
    let app = app();
    let (status, rec) = call(&app, "GET", "/v1/items/hecht-01/similar?limit=5", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(rec["mode"], "similar");
    assert_eq!(rec["ranked"][0]["item_id"], "hecht-04");
    assert_eq!(rec["ranked"][0]["score"], 1.0);

    let (status, rec) = call(&app, "GET", "/v1/items/hecht-01/opposite", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(rec["ranked"][0]["item_id"], "hecht-03");
    assert_eq!(strings(&rec["ranked"][0]["labels"]), ["sanctity-awe"]);

    let (_, rec) = call(&app, "GET", "/v1/items/hecht-01/opposite?limit=0", None).await;
    assert_eq!(rec["ranked"].as_array().unwrap().len(), 0);
    let (_, rec) = call(&app, "GET", "/v1/items/hecht-01/opposite?emotion_contrast=true", None).await;
    assert_eq!(rec["ranked"][0]["emotion_contrast"], false);
}

#[tokio::test]
async fn bad_queries_and_unclassifiable_seeds() {
    let app = app();
    let (status, err) = call(&app, "GET", "/v1/items/hecht-01/similar?limit=lots", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "malformed_request");
    let (status, err) = call(&app, "GET", "/v1/items/hecht-05/opposite", None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["error"], "unclassifiable_seed");
    assert!(err["message"].as_str().unwrap().contains("unclassifiable seed"));
}

#[tokio::test]
async fn prototypes_listing_and_detail() {
    let app = app();
    let (status, body) = call(&app, "GET", "/v1/prototypes?kind=compound", None).await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = body["prototypes"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    for name in ["degradation-disgust", "betrayal-aggressiveness", "sanctity-awe"] {
        assert!(names.contains(&name), "{name}");
    }
    assert!(body["prototypes"].as_array().unwrap().iter().all(|p| p["kind"] == "compound"));

    let (status, p) = call(&app, "GET", "/v1/prototypes/degradation-disgust", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(p["parents"]["head"], "degradation");
    assert_eq!(p["parents"]["modifier"], "disgust");
    assert!(p["typical"].as_array().unwrap().len() <= 7);
    assert!(p["combination"]["scenario_probability"].as_f64().unwrap() > 0.0);
    assert!(p["combination"]["discarded"]["trivial"].as_u64().unwrap() == 1);

    let (status, _) = call(&app, "GET", "/v1/prototypes/nothing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/v1/prototypes?kind=mystery", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn ingestion_through_the_api() {
    let app = router(Arc::new(CatalogStore::in_memory(fixture_bundle())));
    let body = json!([
        catalog_item("hecht-01"),
        {"id": "x-1", "title": "Only words", "description": "the of and"},
        {"id": "x-2", "title": "Broken", "description": null}
    ])
    .to_string();
    let (status, summary) = call(&app, "POST", "/v1/catalog", Some(&body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary["ingested"], 2);
    assert_eq!(summary["classified"], 1);
    assert_eq!(summary["rejected"][0]["item_id"], "x-2");
    let (_, c) = call(&app, "GET", "/v1/items/x-1/classification", None).await;
    assert_eq!(c["reason"], "empty profile");
    let (status, _) = call(&app, "GET", "/v1/items/x-2", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (_, again) = call(&app, "POST", "/v1/catalog", Some(&body)).await;
    assert_eq!(again["ingested"], 0);
    assert_eq!(again["unchanged"], 2);
}

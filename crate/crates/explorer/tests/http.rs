use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use cubiclab::tile::{Tile, MAGIC};
use cubq::config::ServiceConfig;
use cubq::server::{router, AppState};
use tower::ServiceExt;

const BODY_LIMIT: usize = 1 << 24;

fn app(wait_ms: u64) -> Router {
    let config = ServiceConfig {
        wait_ms,
        ..ServiceConfig::default()
    };
    router(AppState::new(&config).unwrap())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let resp = app
        .clone()
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = to_bytes(resp.into_body(), BODY_LIMIT).await.unwrap().to_vec();
    (status, headers, body)
}

fn json(body: &[u8]) -> serde_json::Value {
    serde_json::from_slice(body).unwrap()
}

#[tokio::test]
async fn health_reports_format_and_workers() {
    let (status, _, body) = get(&app(2000), "/api/health").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["tile_format"], 1);
    assert_eq!(v["workers"], 2);
}

#[tokio::test]
async fn slice_tile_is_cached() {
    let app = app(60_000);
    let uri = "/api/slice?lambda_re=0&lambda_im=0&res=24";
    let (status, headers, first) = get(&app, uri).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers[header::CONTENT_TYPE], "application/octet-stream");
    assert_eq!(headers["x-cache"], "miss");
    assert_eq!(&first[..4], MAGIC);
    let tile = Tile::decode(&first).unwrap();
    assert_eq!((tile.resolution.width, tile.resolution.height), (24, 24));

    let (status, headers2, second) = get(&app, uri).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers2["x-cache"], "hit");
    assert_eq!(headers2[header::ETAG], headers[header::ETAG]);
    assert_eq!(first, second);
}

#[tokio::test]
async fn multiplier_outside_disk_is_bad_request() {
    let (status, _, body) = get(&app(2000), "/api/slice?lambda_re=1.5&res=8").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(json(&body)["error"].as_str().unwrap().contains("outside"));
    let (status, _, _) = get(&app(2000), "/api/classify?lambda_re=2").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn slow_tile_answers_retry_then_completes() {
    let app = app(0);
    let uri = "/api/slice?lambda_re=0.1&res=40";
    let (status, headers, body) = get(&app, uri).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(headers[header::RETRY_AFTER], "2");
    assert_eq!(json(&body)["status"], "computing");
    for _ in 0..600 {
        let (status, _, body) = get(&app, uri).await;
        if status == StatusCode::OK {
            assert_eq!(&body[..4], MAGIC);
            return;
        }
        assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
        tokio::time::sleep(Duration::from_millis(100)).await;
    }
    panic!("tile never completed");
}

#[tokio::test]
async fn classify_origin_is_in_phd() {
    let (status, _, body) = get(&app(2000), "/api/classify?lambda_re=0&b_re=0").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["tag"], "InPHD");
}

#[tokio::test]
async fn petal_report_has_outlines() {
    let (status, _, body) = get(&app(2000), "/api/petal?lambda_re=1&b_re=0&samples=64").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["m"], 2);
    let sectors = v["sectors"].as_array().unwrap();
    assert_eq!(sectors.len(), 2);
    assert!(sectors.iter().all(|s| s["outline"].as_array().unwrap().len() > 8));
}

#[tokio::test]
async fn rays_of_the_cube_have_no_pairs() {
    let (status, _, body) = get(&app(2000), "/api/rays?max_period=2").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert!(v["census"]["pairs"].as_array().unwrap().is_empty());
    assert!(!v["rays"].as_array().unwrap().is_empty());
    let (status, _, _) = get(&app(2000), "/api/rays?max_period=9").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn dynamics_tile_decodes() {
    let (status, _, body) = get(&app(60_000), "/api/dynamics?lambda_re=0.5&b_re=0.3&res=32&budget=64").await;
    assert_eq!(status, StatusCode::OK);
    let tile = Tile::decode(&body).unwrap();
    assert_eq!(tile.flags.len(), 32 * 32);
}

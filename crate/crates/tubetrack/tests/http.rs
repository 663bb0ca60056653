use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use base64::Engine as _;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use tubetrack::core::eval::{accuracy, generate_scene, SceneKind, SceneSpec, SyntheticScene};
use tubetrack::core::{GrayImage, PipelineConfig};
use tubetrack::io::encode_png16;
use tubetrack::server::{router, SessionStore};

fn scene() -> SyntheticScene {
    let mut spec = SceneSpec::new(SceneKind::Line, 11);
    spec.width = 200;
    spec.height = 140;
    generate_scene(&spec).unwrap()
}

fn app(allow_paths: bool) -> Router {
    let cfg = PipelineConfig {
        threshold_quantile: 0.9,
        ..PipelineConfig::default()
    };
    router(Arc::new(SessionStore::new(cfg, None, allow_paths)))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn call_json(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap())
}

fn b64(img: &GrayImage) -> String {
    base64::engine::general_purpose::STANDARD.encode(encode_png16(img))
}

#[tokio::test]
async fn create_list_track_and_fetch_image() {
    let sc = scene();
    let app = app(false);
    let (status, created) = call_json(&app, "POST", "/sessions", Some(json!({"image_base64": b64(&sc.image)}))).await;
    assert_eq!(status, StatusCode::OK, "{created}");
    let id = created["session_id"].as_str().unwrap().to_string();
    assert_eq!(created["width"], 200);
    assert_eq!(created["height"], 140);
    assert!(!created["trajectories"].as_array().unwrap().is_empty());
    assert_eq!(created["prepared"]["graph_cached"], false);

    // the same image again reuses the session
    let (_, again) = call_json(&app, "POST", "/sessions", Some(json!({"image_base64": b64(&sc.image)}))).await;
    assert_eq!(again["session_id"], id.as_str());
    assert!(again["prepared"].is_null());

    let (status, tr) = call_json(&app, "GET", &format!("/sessions/{id}/trajectories"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(tr["zeta_preview"].as_str().unwrap().starts_with("data:image/png;base64,"));
    assert_eq!(tr["trajectories"], created["trajectories"]);

    let st = &sc.structures[0];
    let points = json!([[st.seeds.0.x, st.seeds.0.y], [st.seeds.1.x, st.seeds.1.y]]);
    for metric in ["fsr", "fe", "angle"] {
        let (status, r) = call_json(
            &app,
            "POST",
            &format!("/sessions/{id}/track"),
            Some(json!({"points": points, "metric": metric})),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{r}");
        let poly: Vec<(f64, f64)> = serde_json::from_value(r["polyline"].clone()).unwrap();
        let j = accuracy(&poly, &st.mask).unwrap().j;
        assert!(j > 0.9, "{metric}: J = {j}");
        assert_eq!(r["legs"].as_array().unwrap().len(), 1);
    }

    let (status, png) = call(&app, "GET", &format!("/sessions/{id}/image"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(&png[1..4], b"PNG");
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = app(false);
    let (status, body) = call_json(&app, "GET", "/sessions/deadbeef/trajectories", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"], "unknown_session");
    let (status, _) = call_json(
        &app,
        "POST",
        "/sessions/deadbeef/track",
        Some(json!({"points": [[0, 0], [1, 1]]})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn blank_image_track_is_422_no_route() {
    let img = GrayImage::new(80, 60, vec![0.7; 80 * 60]).unwrap();
    let app = app(false);
    let (status, created) = call_json(&app, "POST", "/sessions", Some(json!({"image_base64": b64(&img)}))).await;
    assert_eq!(status, StatusCode::OK);
    let id = created["session_id"].as_str().unwrap();
    let (status, body) = call_json(
        &app,
        "POST",
        &format!("/sessions/{id}/track"),
        Some(json!({"points": [[5, 5], [70, 50]]})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "no_route");
    assert!(body["detail"].is_string());
}

#[tokio::test]
async fn bad_requests_are_400() {
    let app = app(false);
    let (status, body) = call_json(&app, "POST", "/sessions", Some(json!({"image_path": "/etc/hosts"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "invalid_input");
    let (status, body) = call_json(&app, "POST", "/sessions", Some(json!({"image_base64": "bm90IGFuIGltYWdl"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "unreadable_image");
    let img = GrayImage::new(80, 60, vec![0.7; 80 * 60]).unwrap();
    let (status, body) = call_json(
        &app,
        "POST",
        "/sessions",
        Some(json!({"image_base64": b64(&img), "config": {"beta": -1.0}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "invalid_config");
}

#[tokio::test]
async fn server_side_paths_when_allowed() {
    let sc = scene();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("scene.png");
    tubetrack::io::write_png16(&p, &sc.image).unwrap();
    let app = app(true);
    let (status, created) = call_json(&app, "POST", "/sessions", Some(json!({"image_path": p}))).await;
    assert_eq!(status, StatusCode::OK, "{created}");
    let (_, by_bytes) = call_json(&app, "POST", "/sessions", Some(json!({"image_base64": b64(&sc.image)}))).await;
    assert_eq!(created["session_id"], by_bytes["session_id"]);
}

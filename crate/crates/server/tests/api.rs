use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use compareviz_server::{router, ServerConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const NETFLIX: &[u8] = include_bytes!("../../../data/netflix.csv");
const BOUNDARY: &str = "XcompareX";

fn multipart(parts: &[(&str, &[u8])]) -> Vec<u8> {
    let mut body = Vec::new();
    for (name, bytes) in parts {
        body.extend_from_slice(
            format!("--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"{name}\"; filename=\"{name}\"\r\n\r\n")
                .as_bytes(),
        );
        body.extend_from_slice(bytes);
        body.extend_from_slice(b"\r\n");
    }
    body.extend_from_slice(format!("--{BOUNDARY}--\r\n").as_bytes());
    body
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, String) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn upload(app: &Router, parts: &[(&str, &[u8])]) -> (StatusCode, Value) {
    let req = Request::post("/datasets")
        .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={BOUNDARY}"))
        .body(Body::from(multipart(parts)))
        .unwrap();
    let (status, text) = send(app, req).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

async fn post_json(app: &Router, uri: &str, body: Value) -> (StatusCode, String) {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await
}

async fn netflix_session(app: &Router) -> String {
    let (status, body) = upload(app, &[("file", NETFLIX)]).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["session_id"].as_str().unwrap().to_string()
}

fn designs(body: &str) -> Vec<String> {
    let v: Value = serde_json::from_str(body).unwrap();
    v["recommendations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["design"]["id"].as_str().unwrap().to_string())
        .collect()
}

#[tokio::test]
async fn upload_returns_schema() {
    let app = router(&ServerConfig::default());
    let (status, body) = upload(&app, &[("file", NETFLIX)]).await;
    assert_eq!(status, StatusCode::CREATED);
    assert!(body["session_id"].as_str().is_some_and(|s| !s.is_empty()));
    let names: Vec<&str> = body["schema"]["attributes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"Box office"), "{names:?}");
}

#[tokio::test]
async fn metadata_part_overrides_entity() {
    let app = router(&ServerConfig::default());
    let meta = br#"{"entity": "Genre"}"#;
    let (status, body) = upload(&app, &[("file", NETFLIX), ("metadata", meta)]).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(body["schema"]["entity"], "Genre");
}

#[tokio::test]
async fn malformed_row_is_422_with_row() {
    let app = router(&ServerConfig::default());
    let (status, body) = upload(&app, &[("file", b"Name,Price\na,1\nb,2,3\n")]).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "malformed_row");
    assert!(body["details"]["row"].as_u64().is_some(), "{body}");
}

#[tokio::test]
async fn duplicate_columns_are_422() {
    let app = router(&ServerConfig::default());
    let (status, body) = upload(&app, &[("file", b"Name,Price,price\na,1,2\n")]).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "duplicate_column");
}

#[tokio::test]
async fn oversize_upload_is_413() {
    let app = router(&ServerConfig {
        max_upload_bytes: 256,
        ..ServerConfig::default()
    });
    let (status, body) = upload(&app, &[("file", NETFLIX)]).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE, "{body}");
}

#[tokio::test]
async fn n_m_query_is_ranked_and_repeatable() {
    let app = router(&ServerConfig::default());
    let id = netflix_session(&app).await;
    let uri = format!("/sessions/{id}/query");
    let q = json!({ "utterance": "compare crime shows to thriller shows in terms of box office" });
    let (status, first) = post_json(&app, &uri, q.clone()).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(designs(&first), ["M", "N", "O", "P"]);
    let (_, second) = post_json(&app, &uri, q).await;
    assert_eq!(first, second);
    assert!(first.ends_with("}\n") && !first.contains('\r'));
}

#[tokio::test]
async fn choosing_interpretations() {
    let app = router(&ServerConfig::default());
    let id = netflix_session(&app).await;
    let (status, base) = post_json(
        &app,
        &format!("/sessions/{id}/query"),
        json!({ "utterance": "compare the popularity of all high rated movies" }),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{base}");
    let v: Value = serde_json::from_str(&base).unwrap();
    let qid = v["query_id"].as_str().unwrap();
    assert!(v["plan"]["entries"]["attribute"]["interpretations"].as_array().unwrap().len() >= 2);
    let choose = format!("/sessions/{id}/query/{qid}/choose");

    let (status, same) = post_json(&app, &choose, json!({ "reference": "value:0", "index": 0 })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(same, base);

    let (status, constant) = post_json(&app, &choose, json!({ "reference": "value:0", "index": 2 })).await;
    assert_eq!(status, StatusCode::OK, "{constant}");
    let c: Value = serde_json::from_str(&constant).unwrap();
    assert_ne!(c["query_id"], v["query_id"]);
    let predicate = &c["plan"]["entries"]["value:0"]["interpretations"][2]["provenance"];
    assert_eq!(predicate, "high rated = IMDB rating > 8");
    assert_eq!(c["plan"]["entries"]["value:0"]["chosen"], 2);
    let caption = c["recommendations"][0]["spec"]["description"].as_str().unwrap();
    assert!(caption.contains("IMDB rating > 8"), "{caption}");

    let (status, switched) = post_json(&app, &choose, json!({ "reference": "attribute", "index": 1 })).await;
    assert_eq!(status, StatusCode::OK);
    let s: Value = serde_json::from_str(&switched).unwrap();
    assert_eq!(designs(&switched), designs(&base));
    let field = |v: &Value| v["recommendations"][0]["spec"]["usermeta"]["measure_field"].clone();
    assert_ne!(field(&s), field(&v));
    assert_eq!(field(&s), "Watched");

    let (status, err) = post_json(&app, &choose, json!({ "reference": "value:0", "index": 9 })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["code"], "interpretation_index");
    assert_eq!(e["details"]["available"], 3);

    let (status, _) = post_json(&app, &choose, json!({ "reference": "value:5", "index": 0 })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = post_json(
        &app,
        &format!("/sessions/{id}/query/0000/choose"),
        json!({ "reference": "value:0", "index": 0 }),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn resolution_errors_use_envelope() {
    let app = router(&ServerConfig::default());
    let id = netflix_session(&app).await;
    let (status, body) = post_json(
        &app,
        &format!("/sessions/{id}/query"),
        json!({ "utterance": "what is the budget of Dark" }),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let e: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(e["code"], "not_a_comparison");
    assert!(e["message"].as_str().is_some_and(|m| !m.is_empty()));
    assert!(e["details"].is_object());
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = router(&ServerConfig::default());
    let (status, body) = post_json(&app, "/sessions/nope/query", json!({ "utterance": "x" })).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let e: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(e["code"], "unknown_session");
}

#[tokio::test]
async fn catalog_and_health() {
    let app = router(&ServerConfig::default());
    let (status, body) = send(&app, Request::get("/healthz").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["status"], "ok");
    let (status, body) = send(&app, Request::get("/catalog").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("\"M\""), "{body}");
}

#[tokio::test]
async fn sessions_expire() {
    let app = router(&ServerConfig {
        session_ttl: Duration::from_millis(0),
        ..ServerConfig::default()
    });
    let id = netflix_session(&app).await;
    tokio::time::sleep(Duration::from_millis(5)).await;
    let (status, _) = post_json(&app, &format!("/sessions/{id}/query"), json!({ "utterance": "x" })).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn snapshots_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = ServerConfig {
        snapshot_dir: Some(dir.path().to_path_buf()),
        ..ServerConfig::default()
    };
    let id = netflix_session(&router(&config)).await;
    let restarted = router(&config);
    let (status, body) = post_json(
        &restarted,
        &format!("/sessions/{id}/query"),
        json!({ "utterance": "compare crime shows to thriller shows in terms of box office" }),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
}

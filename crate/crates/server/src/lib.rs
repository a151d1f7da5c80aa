//! HTTP JSON API: upload a CSV to open a session, then query it.

mod error;
mod session;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use compareviz_core::canonical::to_canonical_string;
use compareviz_core::catalog::catalog_document;
use compareviz_core::engine::{EngineConfig, QueryResponse};
use compareviz_core::lexicon::Lexicon;
use serde::Deserialize;
use serde_json::json;

pub use error::ApiError;
pub use session::{Session, SessionStore, StoredQuery};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub max_upload_bytes: usize,
    pub session_ttl: Duration,
    pub snapshot_dir: Option<PathBuf>,
    pub engine: EngineConfig,
    pub lexicon: Lexicon,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            max_upload_bytes: 10 * 1024 * 1024,
            session_ttl: Duration::from_secs(3600),
            snapshot_dir: None,
            engine: EngineConfig::default(),
            lexicon: Lexicon::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
}

impl AppState {
    pub fn new(config: &ServerConfig) -> Self {
        Self {
            store: Arc::new(SessionStore::new(
                config.session_ttl,
                config.snapshot_dir.clone(),
                config.lexicon.clone(),
                config.engine,
            )),
        }
    }
}

pub fn router(config: &ServerConfig) -> Router {
    router_with_state(AppState::new(config), config.max_upload_bytes)
}

pub fn router_with_state(state: AppState, max_upload_bytes: usize) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/catalog", get(catalog))
        .route("/datasets", post(create_dataset))
        .route("/sessions/{id}/query", post(query))
        .route("/sessions/{id}/query/{qid}/choose", post(choose))
        .layer(DefaultBodyLimit::max(max_upload_bytes))
        .with_state(state)
}

/// Binds `addr` and serves until ctrl-c; expired sessions are swept in the
/// background.
pub async fn serve(addr: SocketAddr, config: ServerConfig) -> std::io::Result<()> {
    let state = AppState::new(&config);
    let sweeper = state.store.clone();
    let every = (config.session_ttl / 2).max(Duration::from_secs(1));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            sweeper.evict_expired();
        }
    });
    let app = router_with_state(state, config.max_upload_bytes);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn canonical(status: StatusCode, body: &impl serde::Serialize) -> Result<Response, ApiError> {
    let text = to_canonical_string(body).map_err(ApiError::from)?;
    Ok((status, [(header::CONTENT_TYPE, "application/json")], text).into_response())
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn catalog() -> Result<Response, ApiError> {
    canonical(StatusCode::OK, &catalog_document())
}

async fn create_dataset(State(state): State<AppState>, mut multipart: Multipart) -> Result<Response, ApiError> {
    let mut csv: Option<Vec<u8>> = None;
    let mut metadata: Option<Vec<u8>> = None;
    loop {
        let field = match multipart.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => break,
            Err(e) => return Err(multipart_error(e)),
        };
        let name = field.name().unwrap_or_default().to_string();
        let has_file = field.file_name().is_some();
        let bytes = field.bytes().await.map_err(multipart_error)?.to_vec();
        match name.as_str() {
            "metadata" => metadata = Some(bytes),
            "file" | "csv" | "dataset" => csv = Some(bytes),
            _ if has_file && csv.is_none() => csv = Some(bytes),
            _ => {}
        }
    }
    let csv = csv.ok_or_else(|| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "missing_file", "multipart body has no 'file' part")
    })?;
    let session = state.store.create(&csv, metadata.as_deref())?;
    canonical(
        StatusCode::CREATED,
        &json!({ "session_id": session.id, "schema": session.engine.dataset().schema() }),
    )
}

fn multipart_error(e: axum::extract::multipart::MultipartError) -> ApiError {
    let status = e.status();
    let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
        "payload_too_large"
    } else {
        "bad_multipart"
    };
    ApiError::new(status, code, e.body_text())
}

#[derive(Debug, Deserialize)]
struct QueryRequest {
    utterance: String,
}

#[derive(Debug, Deserialize)]
struct ChooseRequest {
    reference: String,
    index: usize,
}

fn session(state: &AppState, id: &str) -> Result<Arc<Session>, ApiError> {
    state.store.get(id).ok_or_else(|| ApiError::unknown_session(id))
}

fn respond(s: &Session, utterance: &str, r: QueryResponse) -> Result<Response, ApiError> {
    s.remember(
        &r.query_id,
        StoredQuery {
            utterance: utterance.to_string(),
            choices: r.plan.choices(),
        },
    );
    canonical(StatusCode::OK, &r)
}

fn json_body<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "bad_request", e.to_string()))
}

async fn query(State(state): State<AppState>, Path(id): Path<String>, body: axum::body::Bytes) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let req: QueryRequest = json_body(&body)?;
    let r = s.engine.query(&req.utterance)?;
    respond(&s, &req.utterance, r)
}

async fn choose(
    State(state): State<AppState>,
    Path((id, qid)): Path<(String, String)>,
    body: axum::body::Bytes,
) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let req: ChooseRequest = json_body(&body)?;
    let prior = s.recall(&qid).ok_or_else(|| ApiError::unknown_query(&qid))?;
    let mut choices = prior.choices;
    match choices.iter_mut().find(|(r, _)| *r == req.reference) {
        Some(c) => c.1 = req.index,
        None => choices.push((req.reference, req.index)),
    }
    let r = s.engine.query_with(&prior.utterance, &choices)?;
    respond(&s, &prior.utterance, r)
}

//! JSON-over-HTTP facade over catalogs, selection sessions and documents.
//!
//! Requests on one document are serialized by a per-document lock; sessions
//! and catalogs are independent of documents.

mod catalog;
mod documents;
mod sessions;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use crate::catalog::{CatalogError, CatalogSet};
use crate::drawing::DrawingError;
use crate::pipeline::PipelineError;
use crate::po::PoError;
use crate::rules::{RuleError, SelectionSession};
use crate::table::TableError;

pub use documents::DocumentDiff;

/// Shipped with the service at `GET /openapi.yaml`.
pub const OPENAPI: &str = include_str!("openapi.yaml");

pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub catalog: Option<Arc<CatalogSet>>,
    /// Directory of `<name>.json` table kinds.
    pub kinds_dir: Option<PathBuf>,
    /// Idle time after which a session expires.
    pub session_ttl: Duration,
    /// Fixes the id generator; ids come from OS entropy otherwise.
    pub seed: Option<u64>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { catalog: None, kinds_dir: None, session_ttl: DEFAULT_SESSION_TTL, seed: None }
    }
}

pub(crate) struct SessionSlot {
    pub(crate) session: SelectionSession,
    pub(crate) touched: Instant,
}

pub(crate) struct AppState {
    pub(crate) config: ServiceConfig,
    rng: Mutex<ChaCha20Rng>,
    pub(crate) sessions: Mutex<HashMap<String, SessionSlot>>,
    pub(crate) expired: Mutex<BTreeSet<String>>,
    pub(crate) documents: Mutex<BTreeMap<String, Arc<tokio::sync::Mutex<documents::DocEntry>>>>,
}

impl AppState {
    /// 128 random bits as hex.
    pub(crate) fn new_id(&self) -> String {
        let v: u128 = self.rng.lock().expect("id generator lock").random();
        format!("{v:032x}")
    }

    pub(crate) fn catalog(&self) -> Result<&CatalogSet, ApiError> {
        self.config.catalog.as_deref().ok_or_else(|| ApiError::not_found("no catalog is loaded"))
    }
}

pub(crate) type Shared = Arc<AppState>;

/// An error response: `{"error": message}` with the status code.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub(crate) fn bad_request(m: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: m.into() }
    }

    pub(crate) fn not_found(m: impl Into<String>) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, message: m.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<RuleError> for ApiError {
    fn from(e: RuleError) -> Self {
        let status = match e {
            RuleError::UnknownTable(_) => StatusCode::NOT_FOUND,
            RuleError::SessionDone | RuleError::NotDone => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl From<CatalogError> for ApiError {
    fn from(e: CatalogError) -> Self {
        let status = match e {
            CatalogError::UnknownTable(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl From<DrawingError> for ApiError {
    fn from(e: DrawingError) -> Self {
        let status = match &e {
            DrawingError::UnknownId(_) => StatusCode::NOT_FOUND,
            DrawingError::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => StatusCode::NOT_FOUND,
            DrawingError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl From<TableError> for ApiError {
    fn from(e: TableError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

impl From<PoError> for ApiError {
    fn from(e: PoError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Drawing(d) => d.into(),
            other => ApiError::bad_request(other.to_string()),
        }
    }
}

pub(crate) type ApiResult<T> = Result<T, ApiError>;

async fn openapi() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/yaml")], OPENAPI)
}

/// The full HTTP surface over a fresh state.
pub fn router(config: ServiceConfig) -> Router {
    let rng = match config.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_os_rng(),
    };
    let state: Shared = Arc::new(AppState {
        config,
        rng: Mutex::new(rng),
        sessions: Mutex::new(HashMap::new()),
        expired: Mutex::new(BTreeSet::new()),
        documents: Mutex::new(BTreeMap::new()),
    });
    Router::new()
        .route("/openapi.yaml", get(openapi))
        .route("/catalogs", get(catalog::list))
        .route("/catalogs/stats", get(catalog::stats))
        .route("/catalogs/{table}/rows", get(catalog::rows))
        .route("/kinds", get(documents::kinds))
        .route("/sessions", post(sessions::create))
        .route("/sessions/{id}", get(sessions::show).delete(sessions::remove))
        .route("/sessions/{id}/prompt", get(sessions::prompt))
        .route("/sessions/{id}/answer", post(sessions::answer))
        .route("/sessions/{id}/finish", post(sessions::finish))
        .route("/documents", get(documents::list).post(documents::create))
        .route("/documents/{d}", get(documents::show).put(documents::replace).delete(documents::remove))
        .route("/documents/{d}/save", post(documents::save))
        .route("/documents/{d}/diff", get(documents::diff))
        .route("/documents/{d}/duplicates", get(documents::duplicates))
        .route("/documents/{d}/po-structures", get(documents::po_structures))
        .route("/documents/{d}/specify", post(documents::specify))
        .route("/documents/{d}/tables", post(documents::add_table))
        .route("/documents/{d}/tables/{t}", get(documents::show_table))
        .route("/documents/{d}/tables/{t}/ops", post(documents::table_ops))
        .route("/documents/{d}/tables/{t}/layout", get(documents::table_layout))
        .route("/documents/{d}/tables/{t}/region", get(documents::get_region).put(documents::put_region))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

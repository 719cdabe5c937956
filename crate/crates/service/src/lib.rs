//! JSON-over-HTTP front of the pipeline. Sessions live in memory and expire
//! after a period without requests.

use std::collections::HashMap;
use std::future::Future;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use snipfit_core::api::{
    CreateSession, CycleRequest, ErrorBody, FieldError, Health, SessionResponse, Suggestion, SuggestTypesResponse,
    TaskSuggestions, TestRequest, TestResponse,
};
use snipfit_core::corpus::{CorpusError, DEFAULT_SUGGESTIONS};
use snipfit_core::pipeline::{Context, Engine, PipelineError, TaskSession};
use snipfit_core::splice::HARNESS;
use snipfit_core::testkit::{generate_test_skeleton, test_from_source, SignatureError};
use tokio::net::TcpListener;
use tokio::sync::watch;

pub const DEFAULT_TTL: Duration = Duration::from_secs(30 * 60);
pub const DEFAULT_PORT: u16 = 7878;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub ttl: Duration,
    pub suggestion_limit: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ttl: DEFAULT_TTL,
            suggestion_limit: DEFAULT_SUGGESTIONS,
        }
    }
}

struct Entry {
    session: RwLock<TaskSession>,
    done: watch::Receiver<bool>,
    touched: Mutex<Instant>,
}

impl Entry {
    fn read(&self) -> std::sync::RwLockReadGuard<'_, TaskSession> {
        self.session.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, TaskSession> {
        self.session.write().unwrap_or_else(|e| e.into_inner())
    }

    async fn finished(&self) {
        let mut rx = self.done.clone();
        let _ = rx.wait_for(|d| *d).await;
    }
}

pub struct AppState {
    engine: Arc<Engine>,
    settings: Settings,
    sessions: Mutex<HashMap<String, Arc<Entry>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(engine: Engine, settings: Settings) -> Arc<Self> {
        Arc::new(Self {
            engine: Arc::new(engine),
            settings,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    fn table(&self) -> std::sync::MutexGuard<'_, HashMap<String, Arc<Entry>>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn entry(&self, id: &str) -> Result<Arc<Entry>, ApiError> {
        let e = self.table().get(id).cloned().ok_or_else(|| ApiError::not_found(id))?;
        *e.touched.lock().unwrap_or_else(|p| p.into_inner()) = Instant::now();
        Ok(e)
    }

    /// Drops sessions idle for longer than the TTL.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let ttl = self.settings.ttl;
        let mut t = self.table();
        let before = t.len();
        t.retain(|_, e| now.duration_since(*e.touched.lock().unwrap_or_else(|p| p.into_inner())) < ttl);
        before - t.len()
    }

    pub fn session_count(&self) -> usize {
        self.table().len()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.into(),
                fields: Vec::new(),
            },
        }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                error: format!("invalid {field}: {message}"),
                fields: vec![FieldError {
                    field: field.to_string(),
                    message,
                }],
            },
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("no session {id:?}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn backticked(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

/// JSON body whose errors name the offending field.
pub struct ApiJson<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for ApiJson<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        let bytes = Bytes::from_request(req, state)
            .await
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
        let de = &mut serde_json::Deserializer::from_slice(&bytes);
        match serde_path_to_error::deserialize(de) {
            Ok(v) => Ok(ApiJson(v)),
            Err(e) => {
                let inner = e.inner().to_string();
                let path = e.path().to_string();
                let named = (inner.starts_with("missing field") || inner.starts_with("unknown field"))
                    .then(|| backticked(&inner))
                    .flatten();
                let field = match (path.as_str(), named) {
                    (".", Some(n)) => n.to_string(),
                    (".", None) => "body".to_string(),
                    (p, Some(n)) if inner.starts_with("missing field") => format!("{p}.{n}"),
                    (p, _) => p.to_string(),
                };
                Err(ApiError::field(&field, inner))
            }
        }
    }
}

fn context_of(req: &CreateSession) -> Result<Context, ApiError> {
    let (text, cursor) = match (&req.file, req.cursor) {
        (None, None) => return Ok(Context::harness()),
        (Some(_), None) => return Err(ApiError::field("cursor", "required when file is given")),
        (None, Some(c)) => (HARNESS.to_string(), c),
        (Some(f), Some(c)) => (f.clone(), c),
    };
    Context::new(text, cursor).map_err(|e| ApiError::field("cursor", e.to_string()))
}

fn response(id: &str, s: &TaskSession, since: usize) -> SessionResponse {
    let view = s.view();
    let new_candidates = s
        .arrivals
        .iter()
        .skip(since)
        .filter_map(|cid| view.candidates.iter().find(|c| c.id == *cid).cloned())
        .collect();
    SessionResponse {
        id: id.to_string(),
        arrivals: s.arrivals.len(),
        session: view,
        new_candidates,
    }
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    ApiJson(req): ApiJson<CreateSession>,
) -> Result<(StatusCode, Json<SessionResponse>), ApiError> {
    if req.task.trim().trim_end_matches('?').trim().is_empty() {
        return Err(ApiError::field("task", "must not be empty"));
    }
    let ctx = context_of(&req)?;
    let (session, snippets) = app.engine.open_session(&req.task, ctx.clone()).map_err(|e| match e {
        PipelineError::Corpus(CorpusError::EmptyQuery(_)) => ApiError::field("task", e.to_string()),
        e => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    })?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let (tx, rx) = watch::channel(snippets.is_empty());
    let entry = Arc::new(Entry {
        session: RwLock::new(session),
        done: rx,
        touched: Mutex::new(Instant::now()),
    });
    app.table().insert(id.clone(), entry.clone());
    if !snippets.is_empty() {
        let engine = app.engine.clone();
        let worker = entry.clone();
        tokio::task::spawn_blocking(move || {
            engine.process_streaming(&ctx, &snippets, &|c| worker.write().insert(c));
            let _ = tx.send(true);
        });
    }
    if req.wait {
        entry.finished().await;
    }
    let body = response(&id, &entry.read(), 0);
    Ok((StatusCode::CREATED, Json(body)))
}

#[derive(Debug, Deserialize)]
struct SinceQuery {
    #[serde(default)]
    since: usize,
    #[serde(default)]
    wait: bool,
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    q: Result<Query<SinceQuery>, QueryRejection>,
) -> Result<Json<SessionResponse>, ApiError> {
    let Query(q) = q.map_err(|e| ApiError::field("query", e.body_text()))?;
    let entry = app.entry(&id)?;
    if q.wait {
        entry.finished().await;
    }
    let body = response(&id, &entry.read(), q.since);
    Ok(Json(body))
}

async fn cycle(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionResponse>, ApiError> {
    let entry = app.entry(&id)?;
    let req: CycleRequest = if body.iter().all(u8::is_ascii_whitespace) {
        CycleRequest::default()
    } else {
        let de = &mut serde_json::Deserializer::from_slice(&body);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ApiError::field(if path == "." { "body" } else { &path }, e.inner().to_string())
        })?
    };
    let mut s = entry.write();
    for _ in 0..req.steps {
        s.cycle(req.direction)
            .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    }
    Ok(Json(response(&id, &s, s.arrivals.len())))
}

async fn suggest_types(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SuggestTypesResponse>, ApiError> {
    let entry = app.entry(&id)?;
    entry.finished().await;
    let suggestions = entry
        .read()
        .suggest_types()
        .into_iter()
        .map(|s| Suggestion {
            display: s.signature.display(),
            skeleton: generate_test_skeleton(&s.signature).ok(),
            signature: s.signature,
            candidates: s.candidates,
        })
        .collect();
    Ok(Json(SuggestTypesResponse { suggestions }))
}

async fn run_tests(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<TestRequest>,
) -> Result<Json<TestResponse>, ApiError> {
    let entry = app.entry(&id)?;
    let sig = req.signature.parse().map_err(|e| ApiError::field("signature", e.to_string()))?;
    let test = match &req.test_source {
        Some(src) if !src.trim().is_empty() => test_from_source(src),
        _ => generate_test_skeleton(&sig).map_err(|e| ApiError::field("signature", e.to_string()))?,
    };
    entry.finished().await;
    let mut work = entry.read().clone();
    let engine = app.engine.clone();
    let t = test.clone();
    let (work, outcomes) = tokio::task::spawn_blocking(move || {
        let r = work.test_candidates(&t, &sig, req.limit, &engine.registry, &engine.config.budget);
        (work, r)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let outcomes = outcomes.map_err(|e| match e {
        PipelineError::BadTest(_) => ApiError::field("test_source", e.to_string()),
        PipelineError::Signature(SignatureError::NoDefault(_)) => ApiError::field("signature", e.to_string()),
        e => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    })?;
    let view = work.view();
    *entry.write() = work;
    Ok(Json(TestResponse {
        test,
        outcomes,
        session: view,
    }))
}

#[derive(Debug, Deserialize)]
struct PrefixQuery {
    #[serde(default)]
    prefix: String,
    limit: Option<usize>,
}

async fn suggest_tasks(
    State(app): State<Arc<AppState>>,
    q: Result<Query<PrefixQuery>, QueryRejection>,
) -> Result<Json<TaskSuggestions>, ApiError> {
    let Query(q) = q.map_err(|e| ApiError::field("query", e.body_text()))?;
    let limit = q.limit.unwrap_or(app.settings.suggestion_limit);
    Ok(Json(TaskSuggestions {
        suggestions: app.engine.index.suggest_tasks(&q.prefix, limit),
    }))
}

async fn health(State(app): State<Arc<AppState>>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        index: app.engine.index.config,
        stats: app.engine.index.stats(),
        sessions: app.session_count(),
    })
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/tasks/suggest", get(suggest_tasks))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/cycle", post(cycle))
        .route("/sessions/{id}/suggest-types", get(suggest_types))
        .route("/sessions/{id}/tests", post(run_tests))
        .fallback(fallback)
        .with_state(state)
}

/// Binds `addr` and returns the bound address with the server future. The
/// future also evicts idle sessions.
pub async fn bind(
    state: Arc<AppState>,
    addr: SocketAddr,
) -> std::io::Result<(SocketAddr, impl Future<Output = std::io::Result<()>>)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    let sweeper = state.clone();
    let period = (state.settings.ttl / 10).clamp(Duration::from_millis(100), Duration::from_secs(60));
    let app = router(state);
    let fut = async move {
        let sweep = tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                let n = sweeper.evict_idle(Instant::now());
                if n > 0 {
                    tracing::info!(evicted = n, "idle sessions dropped");
                }
            }
        });
        let r = axum::serve(listener, app).await;
        sweep.abort();
        r
    };
    Ok((local, fut))
}

pub fn loopback(port: u16) -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], port))
}

//! HTTP service around a trained pipeline: live parsing against the active
//! model, dataset upload, background retraining and model activation.
//!
//! | method | path                    | success | errors        |
//! |--------|-------------------------|---------|---------------|
//! | POST   | `/parse[?trace=1]`      | 200     | 400, 503      |
//! | POST   | `/datasets`             | 201     | 422           |
//! | GET    | `/datasets`             | 200     |               |
//! | POST   | `/train`                | 202     | 400, 404      |
//! | GET    | `/jobs`, `/jobs/{id}`   | 200     | 404           |
//! | GET    | `/models`               | 200     |               |
//! | POST   | `/models/{id}/activate` | 200     | 404, 409      |

pub mod store;
pub mod worker;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{FromRequest, Multipart, Path as UrlPath, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use slu_core::corpus::{
    build_vocabulary, conll_errors, corpus_stats, parse_conll_file, tokenize_surfaces, CorpusError, DelexConfig,
};
use slu_core::inference::{Frame, Trace};
use slu_core::pipeline::{InferenceParams, Pipeline};
use tokio::sync::mpsc;

use store::{JobState, Store, StoreError};

/// The model parses run against. Swapped as a whole, so a request sees
/// either the old or the new model, never a mix.
pub struct ActiveModel {
    pub id: String,
    pub pipeline: Pipeline,
}

pub struct AppState {
    pub store: Mutex<Store>,
    active: RwLock<Option<Arc<ActiveModel>>>,
    jobs: mpsc::UnboundedSender<String>,
}

impl AppState {
    pub fn active(&self) -> Option<Arc<ActiveModel>> {
        self.active.read().expect("active lock").clone()
    }

    fn swap(&self, model: ActiveModel) {
        *self.active.write().expect("active lock") = Some(Arc::new(model));
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("loading model {id}: {message}")]
    Model { id: String, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Where and how to load a registered model, read under the store lock so
/// the load itself can run without it.
fn model_source(store: &Store, id: &str) -> Option<(PathBuf, InferenceParams)> {
    store.model(id).map(|r| (store.model_dir(id), r.inference.clone()))
}

fn load_model(id: &str, dir: &Path, inference: &InferenceParams) -> Result<ActiveModel, ServiceError> {
    let pipeline = Pipeline::load(
        &dir.join("model.slu"),
        &dir.join("lexicons"),
        &DelexConfig::default(),
        inference,
    )
    .map_err(|e| ServiceError::Model {
        id: id.into(),
        message: e.to_string(),
    })?;
    Ok(ActiveModel {
        id: id.into(),
        pipeline,
    })
}

/// Opens the data directory, reloads the active model, requeues pending
/// jobs and starts the training worker. Must run inside a Tokio runtime.
pub fn app(data_dir: &Path) -> Result<(Router, Arc<AppState>), ServiceError> {
    let (store, requeue) = Store::open(data_dir)?;
    let active = match store.active().and_then(|id| Some((id, model_source(&store, id)?))) {
        Some((id, (dir, inference))) => Some(Arc::new(load_model(id, &dir, &inference)?)),
        None => None,
    };
    let (tx, rx) = mpsc::unbounded_channel();
    for id in requeue {
        tx.send(id).expect("receiver is alive");
    }
    let state = Arc::new(AppState {
        store: Mutex::new(store),
        active: RwLock::new(active),
        jobs: tx,
    });
    worker::spawn(Arc::clone(&state), rx);
    Ok((router(Arc::clone(&state)), state))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/parse", post(parse))
        .route("/datasets", post(upload_dataset).get(list_datasets))
        .route("/train", post(train))
        .route("/jobs", get(list_jobs))
        .route("/jobs/{id}", get(get_job))
        .route("/models", get(list_models))
        .route("/models/{id}/activate", post(activate))
        .with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub host: String,
    pub port: u16,
    pub data_dir: PathBuf,
    /// Directory of static assets (the web console) served under `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        ServeOptions {
            host: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("slu-data"),
            static_dir: None,
        }
    }
}

pub async fn serve(opts: ServeOptions) -> Result<(), ServiceError> {
    let (mut router, _) = app(&opts.data_dir)?;
    if let Some(dir) = &opts.static_dir {
        router = router.fallback_service(tower_http::services::ServeDir::new(dir));
    }
    let addr: SocketAddr = format!("{}:{}", opts.host, opts.port)
        .parse()
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, format!("{}: {e}", opts.host)))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router).await?;
    Ok(())
}

/// JSON error body `{"error": ..., "errors": [...]}` with a status code.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    details: Vec<serde_json::Value>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            details: Vec::new(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if !self.details.is_empty() {
            body["errors"] = self.details.into();
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Deserialize)]
struct ParseRequest {
    text: String,
}

#[derive(Deserialize)]
struct ParseQuery {
    trace: Option<String>,
}

#[derive(Serialize)]
pub struct ParseResponse {
    pub model_id: String,
    pub frame: Frame,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
}

async fn parse(
    State(state): State<Arc<AppState>>,
    Query(q): Query<ParseQuery>,
    Json(req): Json<ParseRequest>,
) -> ApiResult<Json<ParseResponse>> {
    if tokenize_surfaces(&req.text).is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "text is empty"));
    }
    let model = state
        .active()
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no active model"))?;
    let with_trace = matches!(q.trace.as_deref(), Some("1" | "true"));
    // the snapshot is held for the whole request, so an activation mid-parse
    // does not affect it
    let result = tokio::task::spawn_blocking(move || {
        model
            .pipeline
            .parse_traced(&req.text)
            .map(|(frame, trace)| ParseResponse {
                model_id: model.id.clone(),
                frame,
                trace: with_trace.then_some(trace),
            })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    result
        .map(Json)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

fn line_errors(errors: &[CorpusError]) -> Vec<serde_json::Value> {
    errors
        .iter()
        .map(|e| match e {
            CorpusError::Parse { line, message } => json!({ "line": line, "message": message }),
            other => json!({ "message": other.to_string() }),
        })
        .collect()
}

/// Reads the upload: the first file field of a multipart form, or the raw
/// body otherwise.
async fn upload_bytes(state: &Arc<AppState>, req: Request) -> ApiResult<Vec<u8>> {
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let bad = |e: String| ApiError::new(StatusCode::BAD_REQUEST, e);
    if !is_multipart {
        let bytes = axum::body::Bytes::from_request(req, state)
            .await
            .map_err(|e| bad(e.body_text()))?;
        return Ok(bytes.to_vec());
    }
    let mut form = Multipart::from_request(req, state)
        .await
        .map_err(|e| bad(e.body_text()))?;
    let Some(field) = form.next_field().await.map_err(|e| bad(e.body_text()))? else {
        return Err(bad("multipart body has no fields".into()));
    };
    let bytes = field.bytes().await.map_err(|e| bad(e.body_text()))?;
    Ok(bytes.to_vec())
}

async fn upload_dataset(State(state): State<Arc<AppState>>, req: Request) -> ApiResult<Response> {
    let raw = upload_bytes(&state, req).await?;
    let unprocessable = |message: &str, details| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        message: message.into(),
        details,
    };
    let text = std::str::from_utf8(&raw).map_err(|e| unprocessable(&format!("body is not UTF-8: {e}"), Vec::new()))?;
    let errors = conll_errors(text);
    if !errors.is_empty() {
        return Err(unprocessable("dataset does not parse", line_errors(&errors)));
    }
    let corpus = parse_conll_file(text).map_err(|e| unprocessable("dataset does not parse", line_errors(&[e])))?;
    if corpus.is_empty() {
        return Err(unprocessable("dataset has no utterances", Vec::new()));
    }
    let delex = DelexConfig::default();
    let vocab = build_vocabulary(&corpus, delex.min_count);
    let stats = corpus_stats(&corpus, Some(&vocab), &delex.descriptive_slot_classes());
    let stats = serde_json::to_value(stats).expect("stats serialize");
    let record = state
        .store
        .lock()
        .expect("store lock")
        .add_dataset(&raw, corpus.len(), stats)?;
    Ok((StatusCode::CREATED, Json(record)).into_response())
}

async fn list_datasets(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let store = state.store.lock().expect("store lock");
    Json(json!({ "datasets": store.datasets().collect::<Vec<_>>() }))
}

#[derive(Deserialize)]
struct TrainRequest {
    dataset_id: String,
    #[serde(default)]
    config: serde_json::Value,
}

async fn train(State(state): State<Arc<AppState>>, Json(req): Json<TrainRequest>) -> ApiResult<Response> {
    worker::config_with_overrides(&req.config).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    let job = {
        let mut store = state.store.lock().expect("store lock");
        if store.dataset(&req.dataset_id).is_none() {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                format!("unknown dataset {}", req.dataset_id),
            ));
        }
        // enqueue under the lock so channel order equals id order
        let job = store.add_job(&req.dataset_id, req.config)?;
        state.jobs.send(job.id.clone()).expect("worker is alive");
        job
    };
    Ok((
        StatusCode::ACCEPTED,
        Json(json!({ "job_id": job.id, "state": job.state })),
    )
        .into_response())
}

async fn list_jobs(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let store = state.store.lock().expect("store lock");
    Json(json!({ "jobs": store.jobs().collect::<Vec<_>>() }))
}

async fn get_job(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<store::JobRecord>> {
    let store = state.store.lock().expect("store lock");
    store
        .job(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown job {id}")))
}

#[derive(Serialize)]
struct ModelView<'a> {
    #[serde(flatten)]
    record: &'a store::ModelRecord,
    active: bool,
}

async fn list_models(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let store = state.store.lock().expect("store lock");
    let active = store.active();
    let models: Vec<ModelView> = store
        .models()
        .map(|record| ModelView {
            record,
            active: Some(record.id.as_str()) == active,
        })
        .collect();
    Json(json!({ "active": active, "models": models }))
}

/// Accepts a model id, or the id of the job that produced it. A job that
/// has not succeeded has no model to activate (409).
async fn activate(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<serde_json::Value>> {
    let (model_id, (dir, inference)) = {
        let store = state.store.lock().expect("store lock");
        let model_id = if store.model(&id).is_some() {
            id.clone()
        } else if let Some(job) = store.job(&id) {
            match (&job.state, &job.model_id) {
                (JobState::Succeeded, Some(m)) => m.clone(),
                (s, _) => {
                    return Err(ApiError::new(
                        StatusCode::CONFLICT,
                        format!("job {id} is {s:?}; only a succeeded job's model can be activated").to_lowercase(),
                    ))
                }
            }
        } else {
            return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown model {id}")));
        };
        let source = model_source(&store, &model_id).expect("succeeded jobs register their model");
        (model_id, source)
    };
    let mid = model_id.clone();
    // loading reads the model file, which can take a moment; parses keep
    // using the current model meanwhile
    let loaded = tokio::task::spawn_blocking(move || load_model(&mid, &dir, &inference))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    let mut store = state.store.lock().expect("store lock");
    store.set_active(&model_id)?;
    state.swap(loaded);
    Ok(Json(json!({ "active": model_id })))
}

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query as QueryParams, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use warpgate_core::{
    build_index, Catalog, DatabaseNaming, DiscoveryEngine, IndexManifest, JoinCandidate, JoinPreview,
    PipelineConfig, PreviewRequest, Query, SearchParams, TableMeta,
};
use warpgate_core::ingest::RegistrationReport;

use crate::{ApiError, AppState, BuildJob, JobState};

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/corpus", post(register_corpus))
        .route("/index", post(build))
        .route("/index/jobs/{id}", get(job))
        .route("/tables", get(tables))
        .route("/tables/{id}", get(table))
        .route("/tables/{id}/columns", get(columns))
        .route("/tables/{id}/rows", get(rows))
        .route("/search", post(search))
        .route("/preview-join", post(preview))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .method_not_allowed_fallback(|| async {
            let mut e = ApiError::bad_request("method not allowed");
            e.status = StatusCode::METHOD_NOT_ALLOWED.as_u16();
            e
        })
        .with_state(state)
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::bad_request(e.body_text()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub index_loaded: bool,
    pub tables: usize,
    pub columns_indexed: usize,
    pub manifest: Option<IndexManifest>,
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Health> {
    let engine = state.engine();
    Json(Health {
        status: "ok".into(),
        index_loaded: engine.index().is_some(),
        tables: engine.catalog().tables().len(),
        columns_indexed: engine.index().map(|i| i.len()).unwrap_or(0),
        manifest: engine.manifest().cloned(),
    })
}

#[derive(Debug, Deserialize)]
struct CorpusRequest {
    root: std::path::PathBuf,
    #[serde(default)]
    database_naming: DatabaseNaming,
}

#[derive(Debug, Serialize)]
struct CorpusResponse {
    tables: usize,
    columns: usize,
    report: RegistrationReport,
}

async fn register_corpus(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<CorpusRequest>, JsonRejection>,
) -> ApiResult<CorpusResponse> {
    let req = body(payload)?;
    let _guard = state.build_guard.clone().try_lock_owned().map_err(|_| ApiError::build_in_progress())?;
    let (catalog, report) = tokio::task::spawn_blocking(move || {
        let mut catalog = Catalog::new();
        catalog
            .register_corpus(&req.root, req.database_naming)
            .map(|report| (catalog, report))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    let response = CorpusResponse {
        tables: catalog.tables().len(),
        columns: catalog.column_count(),
        report,
    };
    state.replace_engine(DiscoveryEngine::new(Arc::new(catalog)));
    Ok(Json(response))
}

#[derive(Debug, Serialize)]
struct Accepted {
    job_id: u64,
    state: JobState,
}

async fn build(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<PipelineConfig>, JsonRejection>,
) -> Result<Response, ApiError> {
    let config = body(payload)?.normalized();
    config.validate()?;
    let guard = state.build_guard.clone().try_lock_owned().map_err(|_| ApiError::build_in_progress())?;
    let embedder = config.embedder.build()?;
    let job_id = state.new_job();
    let catalog = state.engine().catalog().clone();

    let (tx, rx) = tokio::sync::oneshot::channel();
    let task_state = state.clone();
    tokio::spawn(async move {
        let built = tokio::task::spawn_blocking(move || {
            build_index(&catalog, &config.sample, embedder.as_ref(), &config.lsh)
                .map(|b| DiscoveryEngine::from_build(catalog, embedder, b))
        })
        .await;
        let result: Result<IndexManifest, ApiError> = match built {
            Ok(Ok(engine)) => {
                let manifest = engine.manifest().cloned().expect("fresh builds carry a manifest");
                log::info!("index built: {} columns", manifest.columns_indexed);
                task_state.replace_engine(engine);
                Ok(manifest)
            }
            Ok(Err(e)) => Err(e.into()),
            Err(e) => Err(ApiError::internal(e.to_string())),
        };
        task_state.set_job(BuildJob {
            id: job_id,
            state: if result.is_ok() { JobState::Done } else { JobState::Failed },
            manifest: result.as_ref().ok().cloned(),
            error: result.as_ref().err().cloned(),
        });
        drop(guard);
        let _ = tx.send(result);
    });

    match tokio::time::timeout(state.sync_wait, rx).await {
        Ok(Ok(result)) => result.map(|m| Json(m).into_response()),
        Ok(Err(_)) => Err(ApiError::internal("build task vanished")),
        Err(_) => Ok((
            StatusCode::ACCEPTED,
            Json(Accepted {
                job_id,
                state: JobState::Running,
            }),
        )
            .into_response()),
    }
}

async fn job(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult<BuildJob> {
    state
        .job(id)
        .map(Json)
        .ok_or_else(|| ApiError::not_found(format!("no build job {id}")))
}

async fn tables(State(state): State<Arc<AppState>>) -> Json<Vec<TableMeta>> {
    Json(state.engine().catalog().tables().iter().map(|t| t.meta.clone()).collect())
}

async fn table(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<TableMeta> {
    Ok(Json(state.engine().catalog().resolve_table(&id)?.meta.clone()))
}

async fn columns(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Vec<warpgate_core::engine::ColumnSummary>> {
    let engine = state.engine();
    let table_id = engine.catalog().resolve_table(&id)?.meta.table_id.clone();
    Ok(Json(engine.list_candidate_columns(&table_id)?))
}

#[derive(Debug, Deserialize)]
struct RowWindow {
    #[serde(default)]
    offset: usize,
    #[serde(default = "default_limit")]
    limit: usize,
}

fn default_limit() -> usize {
    50
}

#[derive(Debug, Serialize)]
struct Rows {
    columns: Vec<String>,
    offset: usize,
    total_rows: usize,
    rows: Vec<Vec<Option<String>>>,
}

async fn rows(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    window: Result<QueryParams<RowWindow>, QueryRejection>,
) -> ApiResult<Rows> {
    let QueryParams(w) = window.map_err(|e| ApiError::bad_request(e.body_text()))?;
    if w.limit == 0 {
        return Err(ApiError::bad_request("limit must be positive"));
    }
    let engine = state.engine();
    let t = engine.catalog().resolve_table(&id)?;
    let n = t.row_count();
    let end = w.offset.saturating_add(w.limit).min(n);
    let rows = (w.offset.min(n)..end)
        .map(|r| {
            (0..t.meta.column_names.len())
                .map(|c| t.cell(r, c).map(str::to_string))
                .collect()
        })
        .collect();
    Ok(Json(Rows {
        columns: t.meta.column_names.clone(),
        offset: w.offset,
        total_rows: n,
        rows,
    }))
}

#[derive(Debug, Deserialize)]
pub struct SearchRequest {
    pub table_id: String,
    pub column_name: String,
    #[serde(flatten)]
    pub params: SearchParams,
}

async fn search(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<SearchRequest>, JsonRejection>,
) -> ApiResult<Vec<JoinCandidate>> {
    let req = body(payload)?;
    let engine = state.engine();
    let column = engine.resolve_column(&req.table_id, &req.column_name)?;
    Ok(Json(engine.search_topk(&Query::Column(column), &req.params)?))
}

#[derive(Debug, Deserialize)]
struct PreviewBody {
    query_table: String,
    query_column: String,
    candidate_table: String,
    candidate_column: String,
    #[serde(default)]
    selected_columns: Vec<String>,
    #[serde(default = "default_limit")]
    limit: usize,
}

async fn preview(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<PreviewBody>, JsonRejection>,
) -> ApiResult<JoinPreview> {
    let req = body(payload)?;
    let engine = state.engine();
    let catalog = engine.catalog();
    let request = PreviewRequest {
        query_table: catalog.resolve_table(&req.query_table)?.meta.table_id.clone(),
        query_column: req.query_column,
        candidate_table: catalog.resolve_table(&req.candidate_table)?.meta.table_id.clone(),
        candidate_column: req.candidate_column,
        selected_columns: req.selected_columns,
        limit: req.limit,
    };
    Ok(Json(engine.join_preview(&request)?))
}

//! HTTP service. Jobs run on the blocking pool; their records live in a
//! shared table and are mirrored to the store on every state change.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::Deserialize;
use serde_json::{json, Value};

use super::store::{valid_id, Store, StoreError};
use super::{assess_dataset, pipeline_dataset, records_to_ntriples, run_summary, ReportFormat, DEFAULT_SEED};
use crate::ingest::{format_timestamp, load_mapping, mapping_vocab, parse_timestamp, read_records_csv, read_records_json};
use crate::pipeline::content_id;
use crate::rdf::{parse_ntriples, serialize_ntriples};
use crate::vocab::load_policy;

pub struct AppState {
    pub store: Store,
    jobs: Mutex<BTreeMap<String, Value>>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState {
            store,
            jobs: Mutex::new(BTreeMap::new()),
        }
    }

    fn set_job(&self, job_id: &str, update: impl FnOnce(&mut Value)) {
        let record = {
            let mut jobs = self.jobs.lock().expect("job table poisoned");
            let entry = jobs.entry(job_id.to_string()).or_insert_with(|| json!({}));
            update(entry);
            entry.clone()
        };
        if let Err(e) = self.store.put_job(job_id, &record) {
            log::warn!("could not persist job {job_id}: {e}");
        }
    }

    fn job(&self, job_id: &str) -> Option<Value> {
        if let Some(v) = self.jobs.lock().expect("job table poisoned").get(job_id) {
            return Some(v.clone());
        }
        self.store.job(job_id).ok().flatten()
    }
}

fn error(status: StatusCode, msg: impl std::fmt::Display) -> Response {
    (status, Json(json!({"error": msg.to_string()}))).into_response()
}

fn store_error(e: StoreError) -> Response {
    match e {
        StoreError::InvalidId(_) => error(StatusCode::BAD_REQUEST, e),
        StoreError::Exists(_) => error(StatusCode::CONFLICT, e),
        _ => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/datasets", post(post_dataset))
        .route("/datasets/{id}/assess", post(post_assess))
        .route("/datasets/{id}/pipeline", post(post_pipeline))
        .route("/jobs/{id}", get(get_job))
        .route("/reports/{id}", get(get_report))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, store: Store) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(AppState::new(store)))).await
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

#[derive(Deserialize)]
struct DatasetQuery {
    id: Option<String>,
}

struct Upload {
    ntriples: Vec<u8>,
    vocab: Option<crate::rdf::Graph>,
}

async fn read_multipart(req: Request) -> Result<Upload, Response> {
    let bad = |m: String| error(StatusCode::BAD_REQUEST, m);
    let mut multipart = Multipart::from_request(req, &()).await.map_err(|e| bad(e.to_string()))?;
    let (mut records, mut mapping, mut generated_at) = (None, None, None);
    let mut records_json = false;
    while let Some(field) = multipart.next_field().await.map_err(|e| bad(e.to_string()))? {
        let name = field.name().unwrap_or_default().to_string();
        let is_json = field.content_type() == Some("application/json")
            || field.file_name().is_some_and(|f| f.ends_with(".json"));
        let bytes = field.bytes().await.map_err(|e| bad(e.to_string()))?;
        match name.as_str() {
            "records" => {
                records_json = is_json;
                records = Some(bytes);
            }
            "mapping" => mapping = Some(bytes),
            "generatedAt" => generated_at = Some(String::from_utf8_lossy(&bytes).trim().to_string()),
            other => return Err(bad(format!("unexpected part {other:?}"))),
        }
    }
    let (Some(records), Some(mapping)) = (records, mapping) else {
        return Err(bad("multipart upload needs `records` and `mapping` parts".into()));
    };
    let rules = load_mapping(&mapping).map_err(|e| bad(e.to_string()))?;
    let records = if records_json {
        read_records_json(&records)
    } else {
        read_records_csv(&records)
    }
    .map_err(|e| bad(e.to_string()))?;
    let at = match generated_at {
        Some(s) => parse_timestamp(&s).ok_or_else(|| bad(format!("generatedAt {s:?} is not ISO-8601")))?,
        None => Utc::now(),
    };
    let ntriples = records_to_ntriples(&records, &rules, at).map_err(|e| bad(e.to_string()))?;
    Ok(Upload {
        ntriples,
        vocab: Some(mapping_vocab(&rules)),
    })
}

async fn post_dataset(State(st): State<Arc<AppState>>, Query(q): Query<DatasetQuery>, req: Request) -> Response {
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let upload = if is_multipart {
        match read_multipart(req).await {
            Ok(u) => u,
            Err(r) => return r,
        }
    } else {
        match Bytes::from_request(req, &()).await {
            Ok(b) => Upload {
                ntriples: b.to_vec(),
                vocab: None,
            },
            Err(e) => return error(StatusCode::BAD_REQUEST, e),
        }
    };
    let graph = match parse_ntriples(&upload.ntriples) {
        Ok(g) => g,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let id = q.id.unwrap_or_else(|| content_id(&graph));
    if let Err(e) = st.store.put_dataset(&id, &upload.ntriples, upload.vocab.as_ref()) {
        return store_error(e);
    }
    (
        StatusCode::CREATED,
        Json(json!({
            "datasetId": id,
            "triples": graph.len(),
            "statements": graph.raw_statement_count(),
        })),
    )
        .into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobRequest {
    assessment: Value,
    rules: Value,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    rounds: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum JobKind {
    Assess,
    Pipeline,
}

async fn post_assess(st: State<Arc<AppState>>, id: Path<String>, body: Bytes) -> Response {
    start_job(st, id, body, JobKind::Assess)
}

async fn post_pipeline(st: State<Arc<AppState>>, id: Path<String>, body: Bytes) -> Response {
    start_job(st, id, body, JobKind::Pipeline)
}

fn start_job(State(st): State<Arc<AppState>>, Path(dataset_id): Path<String>, body: Bytes, kind: JobKind) -> Response {
    if !st.store.has_dataset(&dataset_id) {
        return error(StatusCode::NOT_FOUND, format!("no dataset {dataset_id}"));
    }
    let req: JobRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let to_bytes = |v: &Value| serde_json::to_vec(v).expect("serializable");
    let policy = match load_policy(&to_bytes(&req.assessment), &to_bytes(&req.rules)) {
        Ok(p) => p,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e),
    };
    let job_id = uuid::Uuid::new_v4().simple().to_string();
    let kind_name = if kind == JobKind::Assess { "assess" } else { "pipeline" };
    st.set_job(&job_id, |j| {
        *j = json!({
            "jobId": job_id,
            "kind": kind_name,
            "datasetId": dataset_id,
            "state": "Queued",
            "createdAt": format_timestamp(&Utc::now()),
        })
    });

    let seed = req.seed.unwrap_or(DEFAULT_SEED);
    let (st2, jid) = (st.clone(), job_id.clone());
    tokio::task::spawn_blocking(move || {
        st2.set_job(&jid, |j| j["state"] = json!("Running"));
        let result = (|| -> Result<Value, String> {
            let (graph, vocab) = st2
                .store
                .dataset(&dataset_id)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("dataset {dataset_id} disappeared"))?;
            match kind {
                JobKind::Assess => {
                    let report = assess_dataset(&graph, &policy, &dataset_id, seed, &vocab);
                    let rid = st2.store.put_report(&report).map_err(|e| e.to_string())?;
                    Ok(json!({
                        "datasetId": dataset_id,
                        "round": 0,
                        "reportId": rid,
                        "passed": report.passed,
                        "failing": report.failing_metrics(),
                    }))
                }
                JobKind::Pipeline => {
                    let run = pipeline_dataset(&graph, &policy, &dataset_id, seed, req.rounds, &vocab)
                        .map_err(|e| e.to_string())?;
                    let ids = run
                        .history
                        .iter()
                        .map(|(r, _)| st2.store.put_report(r))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    st2.store.put_trace(&jid, &run.trace_jsonl()).map_err(|e| e.to_string())?;
                    let improved = content_id(&run.graph);
                    match st2.store.put_dataset(&improved, &serialize_ntriples(&run.graph), Some(&vocab)) {
                        Ok(()) | Err(StoreError::Exists(_)) => {}
                        Err(e) => return Err(e.to_string()),
                    }
                    let mut summary = run_summary(&run, &ids);
                    summary["reportId"] = json!(ids.last());
                    summary["improvedDatasetId"] = json!(improved);
                    summary["trace"] = json!(format!("traces/{jid}.jsonl"));
                    Ok(summary)
                }
            }
        })();
        st2.set_job(&jid, |j| match result {
            Ok(run_state) => {
                j["state"] = json!("Done");
                j["runState"] = run_state;
            }
            Err(e) => {
                j["state"] = json!("Failed");
                j["error"] = json!(e);
            }
        });
    });
    (StatusCode::ACCEPTED, Json(json!({"jobId": job_id}))).into_response()
}

async fn get_job(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    if !valid_id(&id) {
        return error(StatusCode::NOT_FOUND, format!("no job {id}"));
    }
    match st.job(&id) {
        Some(v) => Json(v).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("no job {id}")),
    }
}

/// Turtle or N-Triples when the Accept header asks for them, JSON otherwise.
fn negotiate(headers: &HeaderMap) -> ReportFormat {
    let accept = headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .unwrap_or_default();
    if accept.contains("text/turtle") {
        ReportFormat::Turtle
    } else if accept.contains("application/n-triples") {
        ReportFormat::Ntriples
    } else {
        ReportFormat::Json
    }
}

async fn get_report(State(st): State<Arc<AppState>>, Path(id): Path<String>, headers: HeaderMap) -> Response {
    if !valid_id(&id) {
        return error(StatusCode::NOT_FOUND, format!("no report {id}"));
    }
    let format = negotiate(&headers);
    match st.store.report(&id, format) {
        Ok(Some(bytes)) => ([(header::CONTENT_TYPE, format.media_type())], bytes).into_response(),
        Ok(None) => error(StatusCode::NOT_FOUND, format!("no report {id}")),
        Err(e) => store_error(e),
    }
}

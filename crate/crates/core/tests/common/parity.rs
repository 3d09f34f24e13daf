//! Drives the binary and the in-process router with the same inputs.

use std::process::Command;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ldq::facade::service::{router, AppState};
use ldq::facade::store::Store;
use serde_json::{json, Value};
use tower::ServiceExt;

pub fn app(dir: &std::path::Path) -> Router {
    router(Arc::new(AppState::new(Store::open(dir).unwrap())))
}

pub async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body)
}

pub fn post(uri: &str, content_type: &str, body: impl Into<Body>) -> Request<Body> {
    Request::post(uri)
        .header(header::CONTENT_TYPE, content_type)
        .body(body.into())
        .unwrap()
}

pub fn get(uri: &str, accept: Option<&str>) -> Request<Body> {
    let mut b = Request::get(uri);
    if let Some(a) = accept {
        b = b.header(header::ACCEPT, a);
    }
    b.body(Body::empty()).unwrap()
}

pub fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

pub fn policy_body(name: &str, extra: Value) -> String {
    let mut body = json!({
        "assessment": json_of(&super::read_fixture(name, "assessment.json")),
        "rules": json_of(&super::read_fixture(name, "rules.json")),
    });
    if let (Some(b), Some(e)) = (body.as_object_mut(), extra.as_object()) {
        b.extend(e.clone());
    }
    body.to_string()
}

/// Polls a job until it leaves Queued/Running.
pub async fn wait_job(app: &Router, job_id: &str) -> Value {
    for _ in 0..600 {
        let (status, body) = send(app, get(&format!("/jobs/{job_id}"), None)).await;
        assert_eq!(status, StatusCode::OK);
        let job = json_of(&body);
        if !matches!(job["state"].as_str(), Some("Queued" | "Running")) {
            return job;
        }
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    panic!("job {job_id} never finished");
}

pub fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ldq")).args(args).output().unwrap()
}

/// Assesses a shipped fixture through the binary and through the service
/// and compares the reports.
pub async fn assess_both(name: &str) -> Result<(), String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = super::fixture_dir(name);
    let path = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let out_nt = tmp.path().join("report.nt");
    let out_json = tmp.path().join("report.json");
    for out in [&out_nt, &out_json] {
        let o = run_cli(&[
            "assess",
            "--dataset",
            &path("dataset.nt"),
            "--assessment",
            &path("assessment.json"),
            "--rules",
            &path("rules.json"),
            "--report",
            &out.to_string_lossy(),
        ]);
        if !o.status.success() {
            return Err(format!("cli: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    let cli_nt = std::fs::read(&out_nt).map_err(|e| e.to_string())?;
    let cli_json: Value = serde_json::from_slice(&std::fs::read(&out_json).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    let app = app(&tmp.path().join("store"));
    let (status, body) = send(&app, post("/datasets", "application/n-triples", super::read_fixture(name, "dataset.nt"))).await;
    if status != StatusCode::CREATED {
        return Err(format!("upload: {status}"));
    }
    let dataset_id = json_of(&body)["datasetId"].as_str().unwrap().to_string();
    let (status, body) = send(
        &app,
        post(&format!("/datasets/{dataset_id}/assess"), "application/json", policy_body(name, json!({}))),
    )
    .await;
    if status != StatusCode::ACCEPTED {
        return Err(format!("assess: {status} {}", String::from_utf8_lossy(&body)));
    }
    let job = wait_job(&app, json_of(&body)["jobId"].as_str().unwrap()).await;
    let report_id = job["runState"]["reportId"]
        .as_str()
        .ok_or_else(|| format!("job without report: {job}"))?
        .to_string();
    let (_, svc_nt) = send(&app, get(&format!("/reports/{report_id}"), Some("application/n-triples"))).await;
    let (_, svc_json) = send(&app, get(&format!("/reports/{report_id}"), Some("application/json"))).await;
    if svc_nt != cli_nt {
        return Err(format!("{name}: N-Triples reports differ"));
    }
    if json_of(&svc_json) != cli_json {
        return Err(format!("{name}: JSON reports differ"));
    }
    Ok(())
}

//! Operational surface: fixture generator, on-disk store, HTTP service and
//! command line. The helpers here are shared by the CLI and the service so
//! both produce the same bytes for the same inputs.

pub mod cli;
pub mod fixture;
pub mod service;
pub mod store;

use chrono::{DateTime, Utc};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::assess::{assess, report_json, report_ntriples, report_turtle, resolve_now, AssessOptions, AssessmentReport};
use crate::ingest::{map_record, EnergyRecord, IngestError, MappingRule, ProvenanceStamp};
use crate::pipeline::{run_pipeline, PipelineError, PipelineInput, RunOptions, RunState};
use crate::rdf::{serialize_ntriples, Graph};
use crate::vocab::QualityPolicy;

pub const DEFAULT_SEED: u64 = 42;
pub const INGEST_AGENT: &str = "ldq";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Ntriples,
    Json,
    Turtle,
}

impl ReportFormat {
    /// Guess from a file extension; N-Triples otherwise.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ReportFormat::Json,
            Some("ttl") => ReportFormat::Turtle,
            _ => ReportFormat::Ntriples,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Ntriples => "nt",
            ReportFormat::Json => "json",
            ReportFormat::Turtle => "ttl",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            ReportFormat::Ntriples => "application/n-triples",
            ReportFormat::Json => "application/json",
            ReportFormat::Turtle => "text/turtle",
        }
    }
}

pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

pub fn render_report(report: &AssessmentReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Ntriples => report_ntriples(report),
        ReportFormat::Json => to_json_bytes(&report_json(report)),
        ReportFormat::Turtle => report_turtle(report),
    }
}

/// N-Triples with one block per record, so repeated records stay visible
/// as repeated statements when the output is parsed again.
pub fn records_to_ntriples(
    records: &[EnergyRecord],
    rules: &[MappingRule],
    generated_at: DateTime<Utc>,
) -> Result<Vec<u8>, IngestError> {
    let mut out = Vec::new();
    for r in records {
        let prov = ProvenanceStamp::for_source(&r.source_id, generated_at, INGEST_AGENT)?;
        out.extend(serialize_ntriples(&map_record(r, rules, &prov)?.graph));
    }
    Ok(out)
}

/// Assessment options at the policy clock.
pub fn assess_options(policy: &QualityPolicy, dataset_id: &str, seed: u64, extra_vocab: &Graph) -> AssessOptions {
    AssessOptions::new(dataset_id, resolve_now(policy))
        .seed(seed)
        .extra_vocab(extra_vocab.clone())
}

pub fn assess_dataset(
    g: &Graph,
    policy: &QualityPolicy,
    dataset_id: &str,
    seed: u64,
    extra_vocab: &Graph,
) -> AssessmentReport {
    assess(g, policy, &assess_options(policy, dataset_id, seed, extra_vocab))
}

pub fn pipeline_dataset(
    g: &Graph,
    policy: &QualityPolicy,
    dataset_id: &str,
    seed: u64,
    rounds: Option<u32>,
    extra_vocab: &Graph,
) -> Result<RunState, PipelineError> {
    let mut opts = RunOptions::new(resolve_now(policy), seed);
    opts.dataset_id = Some(dataset_id.to_string());
    opts.max_rounds = rounds;
    opts.extra_vocab = extra_vocab.clone();
    run_pipeline(PipelineInput::Graph(g), policy, &opts)
}

/// Summary of a run; `report_ids` names the stored report of each round.
pub fn run_summary(run: &RunState, report_ids: &[String]) -> Value {
    let history: Vec<Value> = run
        .history
        .iter()
        .zip(report_ids)
        .map(|((report, precision), id)| {
            json!({
                "round": report.round,
                "reportId": id,
                "passed": report.passed,
                "failing": report.failing_metrics(),
                "precision": precision.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "datasetId": run.dataset_id,
        "round": run.round,
        "terminal": format!("{:?}", run.terminal),
        "history": history,
        "actions": run.actions.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
        "additions": run.additions().len(),
        "deletions": run.deletions().len(),
    })
}

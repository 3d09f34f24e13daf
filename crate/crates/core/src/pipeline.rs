//! The bounded assess/improve loop. Stages exchange [`PipelineMessage`]s
//! through an in-process queue; every message lands in the run trace.

use std::collections::VecDeque;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::assess::{assess, AssessOptions, AssessmentReport, CustomMetric, DereferenceProbe};
use crate::improve::{improve_with, ImprovementAction, ImproverFn, PrecisionRecord};
use crate::ingest::{map_records, mapping_vocab, EnergyRecord, IngestError, MappingRule};
use crate::numeric::{ratio, Rational};
use crate::rdf::{serialize_ntriples, Graph};
use crate::vocab::{DimensionCategory, QualityPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    Ingest,
    Assess,
    Improve,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineMessage {
    pub correlation_id: String,
    pub stage: Stage,
    pub payload_ref: String,
    pub round: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Terminal {
    Passed,
    MaxRoundsExhausted,
    NoImprovement,
}

#[derive(Debug, Clone)]
pub struct RunState {
    pub dataset_id: String,
    /// Index of the last assessment.
    pub round: u32,
    /// One entry per assessment: the report and the precision records of
    /// the improvement that produced its input (empty for round 0).
    pub history: Vec<(AssessmentReport, Vec<PrecisionRecord>)>,
    pub terminal: Terminal,
    pub trace: Vec<PipelineMessage>,
    pub actions: Vec<ImprovementAction>,
    pub graph: Graph,
}

impl RunState {
    pub fn final_report(&self) -> &AssessmentReport {
        &self.history.last().expect("at least one assessment").0
    }

    pub fn additions(&self) -> Graph {
        self.actions.iter().flat_map(|a| a.additions.iter().cloned()).collect()
    }

    pub fn deletions(&self) -> Graph {
        self.actions.iter().flat_map(|a| a.deletions.iter().cloned()).collect()
    }

    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|m| serde_json::to_string(m).expect("serializable") + "\n")
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage id {0:?} is already registered")]
    DuplicateStageId(String),
    #[error("{stage:?} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: IngestError,
        trace: Vec<PipelineMessage>,
    },
}

/// What a registered stage contributes.
#[derive(Clone)]
pub enum StageKind {
    /// Sees every message as it is dequeued.
    Observer(Arc<dyn Fn(&PipelineMessage) + Send + Sync>),
    /// An extra metric measured in every assessment.
    Metric(CustomMetric),
    /// An extra improver, run after the built-in families.
    Improver(ImproverFn),
}

#[derive(Clone)]
pub struct StageDescriptor {
    pub id: String,
    pub kind: StageKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageHandle {
    pub id: String,
    pub index: usize,
}

pub enum PipelineInput<'a> {
    Records {
        records: &'a [EnergyRecord],
        mapping: &'a [MappingRule],
    },
    Graph(&'a Graph),
}

#[derive(Clone)]
pub struct RunOptions {
    pub now: DateTime<Utc>,
    pub seed: u64,
    pub probe: Option<Arc<dyn DereferenceProbe>>,
    /// Computed from the ingested graph when absent.
    pub dataset_id: Option<String>,
    /// Overrides the policy's maxRounds.
    pub max_rounds: Option<u32>,
    pub extra_vocab: Graph,
}

impl RunOptions {
    pub fn new(now: DateTime<Utc>, seed: u64) -> Self {
        RunOptions {
            now,
            seed,
            probe: None,
            dataset_id: None,
            max_rounds: None,
            extra_vocab: Graph::new(),
        }
    }
}

pub const BUILTIN_STAGES: [&str; 3] = ["ingest", "assess", "improve"];

/// Smallest metric gain that counts as progress between rounds.
pub fn improvement_epsilon() -> Rational {
    ratio(1, 1_000_000_000)
}

/// Content id of a graph: the first 16 hex digits of the SHA-256 of its
/// canonical N-Triples.
pub fn content_id(g: &Graph) -> String {
    let digest = Sha256::digest(serialize_ntriples(g));
    hex::encode(digest)[..16].to_string()
}

pub struct Pipeline {
    stages: Vec<StageDescriptor>,
}

impl Default for Pipeline {
    fn default() -> Self {
        Self::new()
    }
}

impl Pipeline {
    pub fn new() -> Self {
        Pipeline { stages: Vec::new() }
    }

    pub fn register_stage(&mut self, descriptor: StageDescriptor) -> Result<StageHandle, PipelineError> {
        if BUILTIN_STAGES.contains(&descriptor.id.as_str()) || self.stages.iter().any(|s| s.id == descriptor.id) {
            return Err(PipelineError::DuplicateStageId(descriptor.id));
        }
        let handle = StageHandle {
            id: descriptor.id.clone(),
            index: self.stages.len(),
        };
        self.stages.push(descriptor);
        Ok(handle)
    }

    fn custom_metrics(&self) -> Vec<CustomMetric> {
        self.stages
            .iter()
            .filter_map(|s| match &s.kind {
                StageKind::Metric(m) => Some(m.clone()),
                _ => None,
            })
            .collect()
    }

    fn improvers(&self) -> Vec<ImproverFn> {
        self.stages
            .iter()
            .filter_map(|s| match &s.kind {
                StageKind::Improver(f) => Some(f.clone()),
                _ => None,
            })
            .collect()
    }

    fn observe(&self, msg: &PipelineMessage) {
        for s in &self.stages {
            if let StageKind::Observer(f) = &s.kind {
                f(msg);
            }
        }
    }

    pub fn run(&self, input: PipelineInput<'_>, policy: &QualityPolicy, opts: &RunOptions) -> Result<RunState, PipelineError> {
        let max_rounds = opts.max_rounds.unwrap_or(policy.max_rounds);
        let mut extra_vocab = opts.extra_vocab.clone();
        let mut trace = Vec::new();
        let mut queue: VecDeque<PipelineMessage> = VecDeque::new();

        let graph = match input {
            PipelineInput::Graph(g) => g.clone(),
            PipelineInput::Records { records, mapping } => {
                extra_vocab.merge(mapping_vocab(mapping));
                match map_records(records, mapping, opts.now, "ldq") {
                    Ok((g, skipped)) => {
                        if skipped > 0 {
                            log::info!("ingest skipped {skipped} field(s)");
                        }
                        g
                    }
                    Err(e) => {
                        let msg = PipelineMessage {
                            correlation_id: format!("run-{}", opts.seed),
                            stage: Stage::Failed,
                            payload_ref: String::new(),
                            round: 0,
                            detail: Some(e.to_string()),
                        };
                        self.observe(&msg);
                        trace.push(msg);
                        return Err(PipelineError::Stage {
                            stage: Stage::Ingest,
                            source: e,
                            trace,
                        });
                    }
                }
            }
        };
        let dataset_id = opts.dataset_id.clone().unwrap_or_else(|| content_id(&graph));
        let correlation_id = format!("run-{dataset_id}-{}", opts.seed);
        let msg = |stage, round, payload_ref: String, detail: Option<String>| PipelineMessage {
            correlation_id: correlation_id.clone(),
            stage,
            payload_ref,
            round,
            detail,
        };

        let mut assess_opts = AssessOptions::new(dataset_id.clone(), opts.now).seed(opts.seed);
        assess_opts.probe = opts.probe.clone();
        assess_opts.extra_vocab = extra_vocab;
        assess_opts.custom_metrics = self.custom_metrics();
        let improvers = self.improvers();

        let mut current = graph;
        let mut history: Vec<(AssessmentReport, Vec<PrecisionRecord>)> = Vec::new();
        let mut actions = Vec::new();
        let mut pending_precision = Vec::new();
        queue.push_back(msg(Stage::Ingest, 0, format!("dataset:{dataset_id}"), None));

        let mut terminal = None;
        while let Some(m) = queue.pop_front() {
            self.observe(&m);
            let round = m.round;
            let stage = m.stage;
            trace.push(m);
            match stage {
                Stage::Ingest => {
                    queue.push_back(msg(Stage::Assess, 0, format!("dataset:{dataset_id}"), None));
                }
                Stage::Assess => {
                    let ao = assess_opts.clone().round(round);
                    let report = assess(&current, policy, &ao);
                    let improved = match history.last() {
                        None => true,
                        Some((prev, _)) => made_progress(prev, &report),
                    };
                    let passed = report.passed;
                    history.push((report, std::mem::take(&mut pending_precision)));
                    let next = if passed {
                        Some(Terminal::Passed)
                    } else if !improved {
                        Some(Terminal::NoImprovement)
                    } else if round >= max_rounds {
                        Some(Terminal::MaxRoundsExhausted)
                    } else {
                        None
                    };
                    let report_ref = format!("report:{dataset_id}:{round}");
                    match next {
                        Some(t) => {
                            terminal = Some(t);
                            queue.push_back(msg(Stage::Done, round, report_ref, Some(format!("{t:?}"))));
                        }
                        None => queue.push_back(msg(Stage::Improve, round, report_ref, None)),
                    }
                }
                Stage::Improve => {
                    let report = &history.last().expect("assessed").0;
                    let ao = assess_opts.clone().round(round);
                    let outcome = improve_with(&current, report, policy, &ao, &improvers);
                    current = outcome.graph;
                    pending_precision = outcome.precision;
                    actions.extend(outcome.actions);
                    queue.push_back(msg(Stage::Assess, round + 1, format!("dataset:{dataset_id}"), None));
                }
                Stage::Done | Stage::Failed => {}
            }
        }
        let round = history.last().map(|(r, _)| r.round).unwrap_or(0);
        Ok(RunState {
            dataset_id,
            round,
            history,
            terminal: terminal.expect("loop ends with a terminal state"),
            trace,
            actions,
            graph: current,
        })
    }
}

/// True when some metric failing in `prev` gained more than the epsilon.
fn made_progress(prev: &AssessmentReport, cur: &AssessmentReport) -> bool {
    let eps = improvement_epsilon();
    prev.failing_metrics().iter().any(|id| match (prev.value(id), cur.value(id)) {
        (Some(a), Some(b)) => b - a > eps,
        _ => false,
    })
}

/// Runs the built-in pipeline with no extra stages.
pub fn run_pipeline(input: PipelineInput<'_>, policy: &QualityPolicy, opts: &RunOptions) -> Result<RunState, PipelineError> {
    Pipeline::new().run(input, policy, opts)
}

/// A metric stage helper.
pub fn metric_stage(
    id: &str,
    category: DimensionCategory,
    weight: Rational,
    compute: impl Fn(&Graph, &QualityPolicy) -> crate::assess::Score + Send + Sync + 'static,
) -> StageDescriptor {
    StageDescriptor {
        id: id.to_string(),
        kind: StageKind::Metric(CustomMetric {
            metric_id: id.to_string(),
            category,
            weight,
            compute: Arc::new(compute),
        }),
    }
}

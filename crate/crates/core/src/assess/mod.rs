//! Quality assessment: one score per configured metric, weighted category
//! and overall scores, threshold checks, and a DQV report.

pub mod metrics;
pub mod probe;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use num_bigint::BigInt;
use num_traits::Zero;

pub use metrics::Score;
pub use probe::{DereferenceProbe, FixtureProbe, ProbeOutcome};
pub use report::{dataset_iri, emit_report_graph, measurement_iri, report_json, report_ntriples, report_turtle};

use crate::numeric::{int, Rational};
use crate::rdf::Graph;
use crate::vocab::{builtin_vocab, DimensionCategory, ParamValue, QualityPolicy, UnitTable};

pub const DEFAULT_SAMPLE_SIZE: usize = 100;
pub const DEFAULT_LMAX_MS: i64 = 1000;

/// Identifiers of the built-in metrics.
pub const METRIC_IDS: [&str; 12] = [
    "availability",
    "performance",
    "interlinking",
    "completeness",
    "consistency",
    "semanticAccuracy",
    "interpretability",
    "interoperability",
    "compactness",
    "provenance",
    "freshness",
    "usability",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    pub metric_id: String,
    pub category: DimensionCategory,
    pub value: Rational,
    pub numerator: BigInt,
    pub denominator: BigInt,
    pub computed_at: DateTime<Utc>,
}

impl Measurement {
    pub fn new(metric_id: &str, category: DimensionCategory, score: Score, computed_at: DateTime<Utc>) -> Self {
        Measurement {
            metric_id: metric_id.to_string(),
            category,
            value: score.value,
            numerator: score.numerator,
            denominator: score.denominator,
            computed_at,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.denominator.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedMetric {
    pub metric_id: String,
    pub category: DimensionCategory,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailTarget {
    Metric(String),
    Category(DimensionCategory),
}

impl fmt::Display for FailTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailTarget::Metric(id) => f.write_str(id),
            FailTarget::Category(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failing {
    pub target: FailTarget,
    pub threshold: Rational,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentReport {
    pub dataset_id: String,
    pub round: u32,
    pub computed_at: DateTime<Utc>,
    pub measurements: Vec<Measurement>,
    pub skipped: Vec<SkippedMetric>,
    /// All four categories; a category with no measured metric scores 1.
    pub category_scores: BTreeMap<DimensionCategory, Rational>,
    /// Categories with at least one measured, positively weighted metric.
    pub measured_categories: BTreeSet<DimensionCategory>,
    pub overall_score: Rational,
    pub failing: Vec<Failing>,
    pub passed: bool,
}

impl AssessmentReport {
    pub fn value(&self, metric_id: &str) -> Option<&Rational> {
        self.measurements
            .iter()
            .find(|m| m.metric_id == metric_id)
            .map(|m| &m.value)
    }

    pub fn measurement(&self, metric_id: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.metric_id == metric_id)
    }

    /// Metric ids behind the failures. A failing category contributes its
    /// measured members scoring below 1.
    pub fn failing_metrics(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.failing {
            match &f.target {
                FailTarget::Metric(id) => {
                    out.insert(id.clone());
                }
                FailTarget::Category(c) => {
                    for m in &self.measurements {
                        if m.category == *c && m.value < int(1) {
                            out.insert(m.metric_id.clone());
                        }
                    }
                }
            }
        }
        out
    }
}

pub type MetricFn = Arc<dyn Fn(&Graph, &QualityPolicy) -> Score + Send + Sync>;

/// A metric supplied at run time, measured after the policy's metrics.
#[derive(Clone)]
pub struct CustomMetric {
    pub metric_id: String,
    pub category: DimensionCategory,
    pub weight: Rational,
    pub compute: MetricFn,
}

impl fmt::Debug for CustomMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMetric")
            .field("metric_id", &self.metric_id)
            .field("category", &self.category)
            .field("weight", &self.weight)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct AssessOptions {
    pub dataset_id: String,
    pub round: u32,
    pub now: DateTime<Utc>,
    pub seed: u64,
    /// Overrides the policy's inline probe map.
    pub probe: Option<Arc<dyn DereferenceProbe>>,
    /// Declared classes and predicates beyond the built-in vocabulary and
    /// the policy shapes, typically from the mapping.
    pub extra_vocab: Graph,
    pub custom_metrics: Vec<CustomMetric>,
    pub units: UnitTable,
}

impl AssessOptions {
    pub fn new(dataset_id: impl Into<String>, now: DateTime<Utc>) -> Self {
        AssessOptions {
            dataset_id: dataset_id.into(),
            round: 0,
            now,
            seed: 0,
            probe: None,
            extra_vocab: Graph::new(),
            custom_metrics: Vec::new(),
            units: UnitTable::builtin(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn round(mut self, round: u32) -> Self {
        self.round = round;
        self
    }

    pub fn probe(mut self, probe: Arc<dyn DereferenceProbe>) -> Self {
        self.probe = Some(probe);
        self
    }

    pub fn extra_vocab(mut self, vocab: Graph) -> Self {
        self.extra_vocab = vocab;
        self
    }
}

/// The reference time for freshness: the policy's, else the wall clock.
pub fn resolve_now(policy: &QualityPolicy) -> DateTime<Utc> {
    policy.reference_time.unwrap_or_else(Utc::now)
}

fn param_usize(policy: &QualityPolicy, id: &str, name: &str, default: usize) -> usize {
    match policy.metric(id).and_then(|m| m.params.get(name)) {
        Some(ParamValue::Number(n)) if n.is_integer() && *n >= int(1) => {
            n.to_integer().try_into().unwrap_or(default)
        }
        _ => default,
    }
}

/// Runs every metric of the policy plus the custom ones.
pub fn assess(g: &Graph, policy: &QualityPolicy, opts: &AssessOptions) -> AssessmentReport {
    let fixture: Option<Arc<dyn DereferenceProbe>> = policy
        .probe
        .as_ref()
        .map(|m| Arc::new(FixtureProbe::new(m.clone())) as Arc<dyn DereferenceProbe>);
    let probe = opts.probe.clone().or(fixture);
    let sample = probe.as_ref().map(|p| {
        let size = param_usize(policy, "availability", "sampleSize", DEFAULT_SAMPLE_SIZE);
        metrics::probe_sample(g, p.as_ref(), size, opts.seed)
    });
    let declared = {
        let mut v = builtin_vocab();
        v.merge(policy.declared_vocab());
        v.merge(opts.extra_vocab.clone());
        v
    };

    let mut scores: Vec<(String, DimensionCategory, Rational, Result<Score, String>)> = Vec::new();
    let mut usability_at = Vec::new();
    for def in &policy.metrics {
        let id = def.metric_id.as_str();
        let result = match id {
            "availability" => sample
                .as_ref()
                .map(|s| metrics::availability_from(s))
                .ok_or_else(|| "no dereference probe configured".to_string()),
            "performance" => sample
                .as_ref()
                .map(|s| {
                    let latencies: Vec<u64> = s.iter().filter_map(|(_, o)| o.latency_ms).collect();
                    let l_max = def.number("lMax").cloned().unwrap_or_else(|| int(DEFAULT_LMAX_MS));
                    metrics::metric_performance(&latencies, &l_max)
                })
                .ok_or_else(|| "no dereference probe configured".to_string()),
            "interlinking" => Ok(metrics::metric_interlinking(g, &policy.linking_predicates)),
            "completeness" => Ok(metrics::metric_completeness(g, &policy.shapes)),
            "consistency" => Ok(metrics::metric_consistency(g, &policy.shapes, &opts.units)),
            "semanticAccuracy" => Ok(metrics::metric_semantic_accuracy(g, &policy.shapes, &opts.units)),
            "interpretability" => Ok(metrics::metric_interpretability(g, &declared)),
            "interoperability" => Ok(metrics::metric_interoperability(g, &policy.standard_namespaces)),
            "compactness" => Ok(metrics::metric_compactness(g)),
            "provenance" => Ok(metrics::metric_provenance(g)),
            "freshness" => Ok(metrics::metric_freshness(g, &opts.now, policy.max_age_seconds)),
            "usability" => {
                usability_at.push(scores.len());
                Ok(Score::vacuous())
            }
            other => Err(format!("no formula for metric {other:?}")),
        };
        scores.push((id.to_string(), def.category, def.weight.clone(), result));
    }
    for cm in &opts.custom_metrics {
        scores.push((
            cm.metric_id.clone(),
            cm.category,
            cm.weight.clone(),
            Ok((cm.compute)(g, policy)),
        ));
    }
    // usability reads every other measured value
    for i in usability_at {
        let values: Vec<(&str, &Rational)> = scores
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .filter_map(|(_, (id, _, _, r))| r.as_ref().ok().map(|s| (id.as_str(), &s.value)))
            .collect();
        let s = metrics::metric_usability(&values, &policy.usability_weights);
        scores[i].3 = Ok(s);
    }

    let mut measurements = Vec::new();
    let mut skipped = Vec::new();
    let mut weights = Vec::new();
    for (id, category, weight, result) in scores {
        match result {
            Ok(score) => {
                measurements.push(Measurement::new(&id, category, score, opts.now));
                weights.push(weight);
            }
            Err(reason) => {
                log::info!("metric {id} skipped: {reason}");
                skipped.push(SkippedMetric {
                    metric_id: id,
                    category,
                    reason,
                })
            }
        }
    }
    aggregate(opts, policy, measurements, weights, skipped)
}

fn weighted_mean(pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Option<Rational> {
    let (mut num, mut den) = (Rational::zero(), Rational::zero());
    for (w, v) in pairs {
        num += &w * v;
        den += w;
    }
    (!den.is_zero()).then(|| num / den)
}

fn aggregate(
    opts: &AssessOptions,
    policy: &QualityPolicy,
    measurements: Vec<Measurement>,
    weights: Vec<Rational>,
    skipped: Vec<SkippedMetric>,
) -> AssessmentReport {
    let mut category_scores = BTreeMap::new();
    let mut measured_categories = BTreeSet::new();
    for cat in DimensionCategory::ALL {
        let members = measurements
            .iter()
            .zip(&weights)
            .filter(|(m, _)| m.category == cat)
            .map(|(m, w)| (w.clone(), m.value.clone()));
        match weighted_mean(members) {
            Some(score) => {
                measured_categories.insert(cat);
                category_scores.insert(cat, score);
            }
            None => {
                category_scores.insert(cat, int(1));
            }
        }
    }
    let overall_score = weighted_mean(measured_categories.iter().map(|c| {
        (
            policy.category_weights.get(c).cloned().unwrap_or_else(|| int(1)),
            category_scores[c].clone(),
        )
    }))
    .unwrap_or_else(|| int(1));

    let mut failing = Vec::new();
    for m in &measurements {
        if let Some(t) = policy.metric_thresholds.get(&m.metric_id) {
            if m.value < *t {
                failing.push(Failing {
                    target: FailTarget::Metric(m.metric_id.clone()),
                    threshold: t.clone(),
                    value: m.value.clone(),
                });
            }
        }
    }
    for cat in &measured_categories {
        if let Some(t) = policy.category_thresholds.get(cat) {
            if category_scores[cat] < *t {
                failing.push(Failing {
                    target: FailTarget::Category(*cat),
                    threshold: t.clone(),
                    value: category_scores[cat].clone(),
                });
            }
        }
    }
    AssessmentReport {
        dataset_id: opts.dataset_id.clone(),
        round: opts.round,
        computed_at: opts.now,
        passed: failing.is_empty(),
        measurements,
        skipped,
        category_scores,
        measured_categories,
        overall_score,
        failing,
    }
}

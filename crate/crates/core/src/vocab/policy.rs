//! Quality policy: the assessment file (metric definitions and shapes) merged
//! with the business-rules file (thresholds, weights, task parameters).

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ns;
use super::units::Dimension;
use crate::numeric::{from_f64_decimal, int, Rational};
use crate::rdf::{Graph, Iri, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DimensionCategory {
    Accessibility,
    Intrinsic,
    RdfLevel,
    TaskDependent,
}

impl DimensionCategory {
    pub const ALL: [DimensionCategory; 4] = [
        DimensionCategory::Accessibility,
        DimensionCategory::Intrinsic,
        DimensionCategory::RdfLevel,
        DimensionCategory::TaskDependent,
    ];

    pub fn iri(self) -> Iri {
        match self {
            DimensionCategory::Accessibility => ns::eldv::accessibility(),
            DimensionCategory::Intrinsic => ns::eldv::consistency(),
            DimensionCategory::RdfLevel => ns::eldv::rdf_level(),
            DimensionCategory::TaskDependent => ns::eldv::tasks_dependent(),
        }
    }

    /// Key used in JSON files and reports.
    pub fn key(self) -> &'static str {
        match self {
            DimensionCategory::Accessibility => "accessibility",
            DimensionCategory::Intrinsic => "intrinsic",
            DimensionCategory::RdfLevel => "rdfLevel",
            DimensionCategory::TaskDependent => "taskDependent",
        }
    }

    /// Accepts the JSON key or the eldv local name.
    pub fn parse(name: &str) -> Option<Self> {
        let name = name.strip_prefix(ns::eldv::NS).unwrap_or(name);
        Some(match name {
            "accessibility" => DimensionCategory::Accessibility,
            "intrinsic" | "consistency" => DimensionCategory::Intrinsic,
            "rdfLevel" | "RDFLevel" => DimensionCategory::RdfLevel,
            "taskDependent" | "tasksDependent" => DimensionCategory::TaskDependent,
            _ => return None,
        })
    }
}

impl fmt::Display for DimensionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Number(Rational),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricDefinition {
    pub metric_id: String,
    pub category: DimensionCategory,
    pub params: BTreeMap<String, ParamValue>,
    pub weight: Rational,
}

impl MetricDefinition {
    pub fn number(&self, name: &str) -> Option<&Rational> {
        match self.params.get(name) {
            Some(ParamValue::Number(n)) => Some(n),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.params.get(name) {
            Some(ParamValue::Text(s)) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateRequirement {
    pub predicate: Iri,
    /// `None` means an object property: the value must be an IRI or blank node.
    pub datatype: Option<Iri>,
    pub unit_dimension: Option<Dimension>,
    pub functional: bool,
    /// Inclusive bounds, in the canonical unit when `unit_dimension` is set.
    pub range: Option<(Rational, Rational)>,
}

impl PredicateRequirement {
    pub fn is_numeric(&self) -> bool {
        self.datatype.as_ref().is_some_and(|d| ns::xsd::is_numeric(d.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeRequirement {
    pub class_iri: Iri,
    pub required: Vec<PredicateRequirement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrHyper {
    pub epsilon: f64,
    pub lambda: f64,
    pub eta0: f64,
    pub iterations: usize,
}

impl Default for SvrHyper {
    fn default() -> Self {
        SvrHyper {
            epsilon: 0.01,
            lambda: 1e-4,
            eta0: 0.5,
            iterations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementParams {
    pub min_support: Rational,
    pub min_confidence: Rational,
    pub tau: Rational,
    pub grid_seconds: u64,
    pub label_predicate: Iri,
    pub svr: SvrHyper,
}

impl Default for ImprovementParams {
    fn default() -> Self {
        ImprovementParams {
            min_support: Rational::new(3.into(), 10.into()),
            min_confidence: Rational::new(4.into(), 5.into()),
            tau: Rational::new(17.into(), 20.into()),
            grid_seconds: 900,
            label_predicate: ns::rdfs::label(),
            svr: SvrHyper::default(),
        }
    }
}

/// One fixture entry for the dereferenceability probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeEntry {
    pub status: u16,
    #[serde(default)]
    pub latency_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityPolicy {
    pub task_id: String,
    pub metrics: Vec<MetricDefinition>,
    pub shapes: Vec<ShapeRequirement>,
    pub metric_thresholds: BTreeMap<String, Rational>,
    pub category_thresholds: BTreeMap<DimensionCategory, Rational>,
    pub category_weights: BTreeMap<DimensionCategory, Rational>,
    pub max_age_seconds: u64,
    pub standard_namespaces: Vec<String>,
    pub linking_predicates: Vec<Iri>,
    pub max_rounds: u32,
    pub usability_weights: BTreeMap<String, Rational>,
    pub improvement: ImprovementParams,
    /// Fixed assessment clock; wall-clock time is used when absent.
    pub reference_time: Option<DateTime<Utc>>,
    /// Inline fixture for the dereferenceability probe.
    pub probe: Option<BTreeMap<String, ProbeEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("config error at {path}: {reason}")]
    Config { path: String, reason: String },
    #[error("threshold for {key} is {value}, outside [0, 1]")]
    ThresholdOutOfRange { key: String, value: String },
    #[error("business rules reference unknown metric {0:?}")]
    UnknownMetricReference(String),
}

fn config_err(path: impl Into<String>, reason: impl Into<String>) -> PolicyError {
    PolicyError::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

impl QualityPolicy {
    pub fn metric(&self, metric_id: &str) -> Option<&MetricDefinition> {
        self.metrics.iter().find(|m| m.metric_id == metric_id)
    }

    pub fn shape_for(&self, class_iri: &Iri) -> Option<&ShapeRequirement> {
        self.shapes.iter().find(|s| &s.class_iri == class_iri)
    }

    /// Classes and predicates declared by the shapes, as a vocabulary graph.
    pub fn declared_vocab(&self) -> Graph {
        let mut g = Graph::new();
        for shape in &self.shapes {
            g.insert(
                Triple::new(
                    Term::Iri(shape.class_iri.clone()),
                    ns::rdf::type_(),
                    Term::Iri(ns::rdfs::class()),
                )
                .expect("IRI subject"),
            );
            for req in &shape.required {
                g.insert(
                    Triple::new(
                        Term::Iri(req.predicate.clone()),
                        ns::rdf::type_(),
                        Term::Iri(ns::rdf::property()),
                    )
                    .expect("IRI subject"),
                );
            }
        }
        g
    }
}

// ---- JSON formats -------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AssessmentFile {
    #[serde(default)]
    task_id: Option<String>,
    metrics: Vec<MetricJson>,
    #[serde(default)]
    shapes: Vec<ShapeJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricJson {
    id: String,
    category: String,
    #[serde(default = "one")]
    weight: f64,
    #[serde(default)]
    params: BTreeMap<String, serde_json::Value>,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ShapeJson {
    #[serde(alias = "class")]
    class_iri: String,
    predicates: Vec<PredicateJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct PredicateJson {
    predicate: String,
    #[serde(default)]
    datatype: Option<String>,
    #[serde(default)]
    unit_dimension: Option<String>,
    #[serde(default)]
    functional: bool,
    #[serde(default)]
    range: Option<[f64; 2]>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RulesFile {
    #[serde(default)]
    task_id: Option<String>,
    #[serde(default)]
    thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    category_thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    category_weights: BTreeMap<String, f64>,
    #[serde(default)]
    max_age_seconds: Option<u64>,
    #[serde(default)]
    standard_namespaces: Option<Vec<String>>,
    #[serde(default)]
    linking_predicates: Option<Vec<String>>,
    #[serde(default)]
    max_rounds: Option<u32>,
    #[serde(default)]
    usability_weights: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    improvement: Option<ImprovementJson>,
    #[serde(default)]
    reference_time: Option<String>,
    #[serde(default)]
    probe: Option<BTreeMap<String, ProbeEntry>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ImprovementJson {
    min_support: Option<f64>,
    min_confidence: Option<f64>,
    tau: Option<f64>,
    grid_seconds: Option<u64>,
    label_predicate: Option<String>,
    svr_epsilon: Option<f64>,
    svr_lambda: Option<f64>,
    svr_eta0: Option<f64>,
    svr_iterations: Option<usize>,
}

fn parse_json<T: DeserializeOwned>(file: &str, bytes: &[u8]) -> Result<T, PolicyError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(format!("{file}:{path}"), e.into_inner().to_string())
    })
}

fn rational(path: &str, v: f64) -> Result<Rational, PolicyError> {
    from_f64_decimal(v).ok_or_else(|| config_err(path, "not a finite number"))
}

fn threshold(key: &str, v: f64) -> Result<Rational, PolicyError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(PolicyError::ThresholdOutOfRange {
            key: key.to_string(),
            value: v.to_string(),
        });
    }
    rational(key, v)
}

fn iri(path: &str, s: &str) -> Result<Iri, PolicyError> {
    Iri::new(s).map_err(|e| config_err(path, e.to_string()))
}

fn valid_metric_id(id: &str) -> bool {
    let mut chars = id.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Loads and merges the two policy files.
pub fn load_policy(assessment: &[u8], business_rules: &[u8]) -> Result<QualityPolicy, PolicyError> {
    let a: AssessmentFile = parse_json("assessment", assessment)?;
    let r: RulesFile = parse_json("rules", business_rules)?;

    let mut metrics = Vec::with_capacity(a.metrics.len());
    let mut usability_weights = BTreeMap::new();
    for (i, m) in a.metrics.iter().enumerate() {
        let path = format!("assessment:metrics[{i}]");
        if !valid_metric_id(&m.id) {
            return Err(config_err(&path, format!("invalid metric id {:?}", m.id)));
        }
        if metrics.iter().any(|d: &MetricDefinition| d.metric_id == m.id) {
            return Err(config_err(&path, format!("duplicate metric id {:?}", m.id)));
        }
        let category = DimensionCategory::parse(&m.category)
            .ok_or_else(|| config_err(format!("{path}.category"), format!("unknown category {:?}", m.category)))?;
        if m.weight < 0.0 {
            return Err(config_err(format!("{path}.weight"), "weight must be nonnegative"));
        }
        let mut params = BTreeMap::new();
        for (name, value) in &m.params {
            let ppath = format!("{path}.params.{name}");
            let pv = match value {
                serde_json::Value::Number(n) => {
                    ParamValue::Number(rational(&ppath, n.as_f64().unwrap_or(f64::NAN))?)
                }
                serde_json::Value::String(s) => ParamValue::Text(s.clone()),
                serde_json::Value::Object(obj) if name == "usabilityWeights" => {
                    for (k, w) in obj {
                        let w = w
                            .as_f64()
                            .filter(|w| *w >= 0.0)
                            .ok_or_else(|| config_err(&ppath, "weights must be nonnegative numbers"))?;
                        usability_weights.insert(k.clone(), rational(&ppath, w)?);
                    }
                    continue;
                }
                _ => return Err(config_err(&ppath, "parameters must be numbers or strings")),
            };
            params.insert(name.clone(), pv);
        }
        metrics.push(MetricDefinition {
            metric_id: m.id.clone(),
            category,
            params,
            weight: rational(&path, m.weight)?,
        });
    }

    let mut shapes = Vec::with_capacity(a.shapes.len());
    for (i, s) in a.shapes.iter().enumerate() {
        let path = format!("assessment:shapes[{i}]");
        if s.predicates.is_empty() {
            return Err(config_err(&path, "shape needs at least one predicate"));
        }
        let mut required = Vec::new();
        for (j, p) in s.predicates.iter().enumerate() {
            let ppath = format!("{path}.predicates[{j}]");
            let datatype = match p.datatype.as_deref() {
                None | Some("@id") => None,
                Some(dt) => Some(iri(&ppath, dt)?),
            };
            let unit_dimension = match &p.unit_dimension {
                None => None,
                Some(d) => Some(
                    Dimension::parse(d)
                        .ok_or_else(|| config_err(&ppath, format!("unknown unit dimension {d:?}")))?,
                ),
            };
            let range = match p.range {
                None => None,
                Some([lo, hi]) => {
                    if lo > hi {
                        return Err(config_err(&ppath, "range min exceeds max"));
                    }
                    Some((rational(&ppath, lo)?, rational(&ppath, hi)?))
                }
            };
            required.push(PredicateRequirement {
                predicate: iri(&ppath, &p.predicate)?,
                datatype,
                unit_dimension,
                functional: p.functional,
                range,
            });
        }
        shapes.push(ShapeRequirement {
            class_iri: iri(&path, &s.class_iri)?,
            required,
        });
    }

    let mut metric_thresholds = BTreeMap::new();
    for (id, v) in &r.thresholds {
        if !metrics.iter().any(|m| &m.metric_id == id) {
            return Err(PolicyError::UnknownMetricReference(id.clone()));
        }
        metric_thresholds.insert(id.clone(), threshold(id, *v)?);
    }
    let mut category_thresholds = BTreeMap::new();
    for (name, v) in &r.category_thresholds {
        let cat = DimensionCategory::parse(name)
            .ok_or_else(|| config_err(format!("rules:categoryThresholds.{name}"), "unknown category"))?;
        category_thresholds.insert(cat, threshold(name, *v)?);
    }
    let mut category_weights: BTreeMap<DimensionCategory, Rational> =
        DimensionCategory::ALL.iter().map(|c| (*c, int(1))).collect();
    for (name, v) in &r.category_weights {
        let path = format!("rules:categoryWeights.{name}");
        let cat = DimensionCategory::parse(name).ok_or_else(|| config_err(&path, "unknown category"))?;
        if *v < 0.0 {
            return Err(config_err(&path, "weight must be nonnegative"));
        }
        category_weights.insert(cat, rational(&path, *v)?);
    }
    if category_weights.values().all(|w| *w == int(0)) {
        return Err(config_err("rules:categoryWeights", "category weights are all zero"));
    }

    if let Some(weights) = &r.usability_weights {
        usability_weights.clear();
        for (k, w) in weights {
            let path = format!("rules:usabilityWeights.{k}");
            if *w < 0.0 {
                return Err(config_err(&path, "weight must be nonnegative"));
            }
            usability_weights.insert(k.clone(), rational(&path, *w)?);
        }
    }

    let max_age_seconds = r.max_age_seconds.unwrap_or(86_400);
    if max_age_seconds == 0 {
        return Err(config_err("rules:maxAgeSeconds", "must be positive"));
    }
    let max_rounds = r.max_rounds.unwrap_or(3);
    if max_rounds == 0 {
        return Err(config_err("rules:maxRounds", "must be positive"));
    }
    let standard_namespaces = r.standard_namespaces.clone().unwrap_or_else(|| {
        [ns::rdf::NS, ns::rdfs::NS, ns::xsd::NS, ns::owl::NS, ns::dqv::NS, ns::eldv::NS]
            .iter()
            .map(|s| s.to_string())
            .collect()
    });
    if standard_namespaces.is_empty() {
        return Err(config_err("rules:standardNamespaces", "must not be empty"));
    }
    let linking_predicates = match &r.linking_predicates {
        None => vec![ns::owl::same_as(), ns::rdfs::see_also()],
        Some(list) if list.is_empty() => {
            return Err(config_err("rules:linkingPredicates", "must not be empty"))
        }
        Some(list) => list
            .iter()
            .map(|p| iri("rules:linkingPredicates", p))
            .collect::<Result<_, _>>()?,
    };

    let mut improvement = ImprovementParams::default();
    if let Some(imp) = &r.improvement {
        let p = "rules:improvement";
        if let Some(v) = imp.min_support {
            if !(v > 0.0 && v <= 1.0) {
                return Err(config_err(format!("{p}.minSupport"), "must be in (0, 1]"));
            }
            improvement.min_support = rational(p, v)?;
        }
        if let Some(v) = imp.min_confidence {
            if !(v > 0.0 && v <= 1.0) {
                return Err(config_err(format!("{p}.minConfidence"), "must be in (0, 1]"));
            }
            improvement.min_confidence = rational(p, v)?;
        }
        if let Some(v) = imp.tau {
            if !(v > 0.0 && v <= 1.0) {
                return Err(config_err(format!("{p}.tau"), "must be in (0, 1]"));
            }
            improvement.tau = rational(p, v)?;
        }
        if let Some(v) = imp.grid_seconds {
            if v == 0 {
                return Err(config_err(format!("{p}.gridSeconds"), "must be positive"));
            }
            improvement.grid_seconds = v;
        }
        if let Some(v) = &imp.label_predicate {
            improvement.label_predicate = iri(p, v)?;
        }
        if let Some(v) = imp.svr_epsilon {
            if v <= 0.0 {
                return Err(config_err(format!("{p}.svrEpsilon"), "must be positive"));
            }
            improvement.svr.epsilon = v;
        }
        if let Some(v) = imp.svr_lambda {
            if v < 0.0 {
                return Err(config_err(format!("{p}.svrLambda"), "must be nonnegative"));
            }
            improvement.svr.lambda = v;
        }
        if let Some(v) = imp.svr_eta0 {
            improvement.svr.eta0 = v;
        }
        if let Some(v) = imp.svr_iterations {
            improvement.svr.iterations = v.max(1);
        }
    }

    let reference_time = match &r.reference_time {
        None => None,
        Some(s) => Some(
            DateTime::parse_from_rfc3339(s)
                .map_err(|e| config_err("rules:referenceTime", e.to_string()))?
                .with_timezone(&Utc),
        ),
    };

    Ok(QualityPolicy {
        task_id: r.task_id.or(a.task_id).unwrap_or_else(|| "default".to_string()),
        metrics,
        shapes,
        metric_thresholds,
        category_thresholds,
        category_weights,
        max_age_seconds,
        standard_namespaces,
        linking_predicates,
        max_rounds,
        usability_weights,
        improvement,
        reference_time,
        probe: r.probe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    const ASSESSMENT: &str = r#"{
        "taskId": "a-task",
        "metrics": [
            {"id": "completeness", "category": "intrinsic", "weight": 2},
            {"id": "freshness", "category": "taskDependent"},
            {"id": "usability", "category": "taskDependent",
             "params": {"usabilityWeights": {"completeness": 2, "freshness": 1}}}
        ],
        "shapes": [{"classIri": "urn:e#Meter", "predicates": [
            {"predicate": "urn:e#kwh", "datatype": "http://www.w3.org/2001/XMLSchema#decimal",
             "unitDimension": "Energy", "functional": true, "range": [0, 100]},
            {"predicate": "urn:e#building"}
        ]}]
    }"#;

    #[test]
    fn merges_both_files_with_defaults() {
        let p = load_policy(ASSESSMENT.as_bytes(), br#"{"thresholds": {"completeness": 0.9}}"#).unwrap();
        assert_eq!(p.task_id, "a-task");
        assert_eq!(p.metrics.len(), 3);
        assert_eq!(p.metrics[0].weight, int(2));
        assert_eq!(p.metric_thresholds["completeness"], ratio(9, 10));
        assert_eq!(p.max_rounds, 3);
        assert_eq!(p.max_age_seconds, 86_400);
        assert_eq!(p.category_weights.len(), 4);
        assert!(p.category_weights.values().all(|w| *w == int(1)));
        assert_eq!(p.usability_weights["completeness"], int(2));
        let req = &p.shapes[0].required;
        assert_eq!(req[0].range, Some((int(0), int(100))));
        assert!(req[1].datatype.is_none());
        assert_eq!(p.linking_predicates, vec![ns::owl::same_as(), ns::rdfs::see_also()]);
    }

    #[test]
    fn threshold_out_of_range() {
        let err = load_policy(ASSESSMENT.as_bytes(), br#"{"thresholds": {"completeness": 1.2}}"#).unwrap_err();
        assert!(matches!(err, PolicyError::ThresholdOutOfRange { .. }));
        let err = load_policy(ASSESSMENT.as_bytes(), br#"{"categoryThresholds": {"intrinsic": -0.1}}"#).unwrap_err();
        assert!(matches!(err, PolicyError::ThresholdOutOfRange { .. }));
    }

    #[test]
    fn unknown_metric_reference() {
        let err = load_policy(ASSESSMENT.as_bytes(), br#"{"thresholds": {"availability": 0.5}}"#).unwrap_err();
        assert_eq!(err, PolicyError::UnknownMetricReference("availability".into()));
    }

    #[test]
    fn config_errors_name_the_path() {
        let err = load_policy(br#"{"metrics": [{"id": "x", "category": "nope"}]}"#, b"{}").unwrap_err();
        match err {
            PolicyError::Config { path, .. } => assert!(path.contains("metrics[0]"), "{path}"),
            other => panic!("{other:?}"),
        }
        let err = load_policy(br#"{"metrics": [], "bogus": 1}"#, b"{}").unwrap_err();
        assert!(matches!(err, PolicyError::Config { .. }));
        assert!(load_policy(b"not json", b"{}").is_err());
        let err = load_policy(br#"{"metrics": []}"#, br#"{"categoryWeights": {"accessibility": 0, "intrinsic": 0, "rdfLevel": 0, "taskDependent": 0}}"#).unwrap_err();
        assert!(matches!(err, PolicyError::Config { .. }));
    }

    #[test]
    fn business_rules_override_usability_weights() {
        let p = load_policy(ASSESSMENT.as_bytes(), br#"{"usabilityWeights": {"freshness": 3}}"#).unwrap();
        assert_eq!(p.usability_weights.len(), 1);
        assert_eq!(p.usability_weights["freshness"], int(3));
    }
}

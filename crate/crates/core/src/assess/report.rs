use serde_json::{json, Value};

use super::{AssessmentReport, FailTarget, Measurement};
use crate::ingest::format_timestamp;
use crate::numeric::{format_decimal, Rational};
use crate::rdf::{serialize_ntriples, serialize_turtle, Graph, Iri, Term, Triple};
use crate::vocab::ns;

/// Digits kept when a value has no finite decimal expansion.
pub const VALUE_DIGITS: usize = 12;

fn encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn dataset_iri(dataset_id: &str) -> Iri {
    Iri::new(format!("urn:ldq:dataset:{}", encode_segment(dataset_id))).expect("encoded IRI")
}

pub fn measurement_iri(dataset_id: &str, round: u32, seq: usize) -> Iri {
    Iri::new(format!("urn:ldq:measurement:{}:{round}:{seq}", encode_segment(dataset_id))).expect("encoded IRI")
}

fn decimal(v: &Rational) -> String {
    format_decimal(v, VALUE_DIGITS)
}

/// One node per measurement, numbered from 1 in declaration order.
pub fn emit_report_graph(report: &AssessmentReport) -> Graph {
    let mut g = Graph::new();
    let dataset = Term::Iri(dataset_iri(&report.dataset_id));
    for (i, m) in report.measurements.iter().enumerate() {
        let node = Term::Iri(measurement_iri(&report.dataset_id, report.round, i + 1));
        let mut add = |p: Iri, o: Term| {
            g.insert(Triple::new(node.clone(), p, o).expect("IRI subject"));
        };
        add(ns::dqv::is_measurement_of(), Term::Iri(ns::eldv::metric(&m.metric_id)));
        add(ns::dqv::value(), Term::typed_literal(decimal(&m.value), ns::xsd::decimal()));
        add(ns::dqv::in_dimension(), Term::Iri(m.category.iri()));
        add(ns::dqv::computed_on(), dataset.clone());
    }
    g
}

pub fn report_ntriples(report: &AssessmentReport) -> Vec<u8> {
    serialize_ntriples(&emit_report_graph(report))
}

pub fn report_turtle(report: &AssessmentReport) -> Vec<u8> {
    serialize_turtle(&emit_report_graph(report), ns::TURTLE_PREFIXES)
}

fn measurement_json(m: &Measurement) -> Value {
    json!({
        "metricId": m.metric_id,
        "category": m.category.key(),
        "value": decimal(&m.value),
        "exact": m.value.to_string(),
        "numerator": m.numerator.to_string(),
        "denominator": m.denominator.to_string(),
        "computedAt": format_timestamp(&m.computed_at),
    })
}

/// The JSON mirror of a report. Rationals appear as decimal strings, with
/// the exact fraction alongside measurement values.
pub fn report_json(report: &AssessmentReport) -> Value {
    let categories: serde_json::Map<String, Value> = report
        .category_scores
        .iter()
        .map(|(c, v)| (c.key().to_string(), Value::String(decimal(v))))
        .collect();
    let failing: Vec<Value> = report
        .failing
        .iter()
        .map(|f| {
            let kind = match f.target {
                FailTarget::Metric(_) => "metric",
                FailTarget::Category(_) => "category",
            };
            let target = match &f.target {
                FailTarget::Metric(id) => id.clone(),
                FailTarget::Category(c) => c.key().to_string(),
            };
            json!({
                "kind": kind,
                "target": target,
                "threshold": decimal(&f.threshold),
                "value": decimal(&f.value),
            })
        })
        .collect();
    json!({
        "datasetId": report.dataset_id,
        "round": report.round,
        "computedAt": format_timestamp(&report.computed_at),
        "measurements": report.measurements.iter().map(measurement_json).collect::<Vec<_>>(),
        "skipped": report.skipped.iter().map(|s| json!({
            "metricId": s.metric_id,
            "category": s.category.key(),
            "reason": s.reason,
        })).collect::<Vec<_>>(),
        "categoryScores": categories,
        "measuredCategories": report.measured_categories.iter().map(|c| c.key()).collect::<Vec<_>>(),
        "overall": decimal(&report.overall_score),
        "failing": failing,
        "passed": report.passed,
    })
}

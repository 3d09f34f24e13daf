//! Maps raw energy records (CSV rows or JSON objects) to RDF through
//! declarative mapping rules, stamping provenance and generation time.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::ns;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RecordType {
    Consumption,
    Generation,
    BuildingInfo,
    Occupancy,
    Dweller,
    Weather,
    Environment,
}

impl RecordType {
    pub const ALL: [RecordType; 7] = [
        RecordType::Consumption,
        RecordType::Generation,
        RecordType::BuildingInfo,
        RecordType::Occupancy,
        RecordType::Dweller,
        RecordType::Weather,
        RecordType::Environment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecordType::Consumption => "Consumption",
            RecordType::Generation => "Generation",
            RecordType::BuildingInfo => "BuildingInfo",
            RecordType::Occupancy => "Occupancy",
            RecordType::Dweller => "Dweller",
            RecordType::Weather => "Weather",
            RecordType::Environment => "Environment",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for RecordType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldValue {
    pub name: String,
    pub value: String,
    pub declared_unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyRecord {
    pub record_type: RecordType,
    pub source_id: String,
    pub timestamp: DateTime<Utc>,
    pub fields: Vec<FieldValue>,
}

impl EnergyRecord {
    pub fn field(&self, name: &str) -> Option<&FieldValue> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMapping {
    pub name: String,
    pub predicate: Iri,
    /// `None` maps the value as an IRI object.
    pub datatype: Option<Iri>,
    pub expected_unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub record_type: RecordType,
    pub class_iri: Iri,
    pub subject_template: String,
    pub fields: Vec<FieldMapping>,
}

pub const DEFAULT_SUBJECT_TEMPLATE: &str = "urn:ldq:{recordType}:{sourceId}:{timestamp}";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceStamp {
    pub source_iri: Iri,
    /// Mapping time, not record time.
    pub generated_at: DateTime<Utc>,
    pub agent: String,
}

impl ProvenanceStamp {
    /// Stamp for a record from `source_id`, using `urn:ldq:source:{sourceId}`.
    pub fn for_source(source_id: &str, generated_at: DateTime<Utc>, agent: &str) -> Result<Self, IngestError> {
        let source_iri = Iri::new(format!("urn:ldq:source:{source_id}")).map_err(|e| IngestError::Template {
            template: "urn:ldq:source:{sourceId}".into(),
            reason: e.to_string(),
        })?;
        Ok(ProvenanceStamp {
            source_iri,
            generated_at,
            agent: agent.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("mapping config error at {path}: {reason}")]
    Config { path: String, reason: String },
    #[error("more than one mapping rule for record type {0}")]
    DuplicateRecordType(RecordType),
    #[error("no mapping rule for record type {0}")]
    NoRuleForType(RecordType),
    #[error("subject template {template:?} does not yield an IRI: {reason}")]
    Template { template: String, reason: String },
    #[error("record {index}: {reason}")]
    Record { index: usize, reason: String },
}

/// Output of [`map_record`]: the triples plus the fields that were not
/// mapped, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedRecord {
    pub graph: Graph,
    pub skipped: Vec<(String, &'static str)>,
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s.trim())
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

fn datetime_literal(t: &DateTime<Utc>) -> Term {
    Term::typed_literal(format_timestamp(t), ns::xsd::date_time())
}

// ---- mapping config ------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingFile {
    rules: Vec<RuleJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RuleJson {
    record_type: String,
    class_iri: String,
    #[serde(default)]
    subject_template: Option<String>,
    #[serde(default)]
    fields: Vec<FieldJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    name: String,
    predicate: String,
    #[serde(default)]
    datatype: Option<String>,
    #[serde(default)]
    unit: Option<String>,
}

fn render_template(template: &str, record_type: &str, source_id: &str, timestamp: &str) -> Result<Iri, IngestError> {
    let mut out = String::with_capacity(template.len() + 48);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').ok_or_else(|| IngestError::Template {
            template: template.into(),
            reason: "unclosed placeholder".into(),
        })? + open;
        match &rest[open + 1..close] {
            "recordType" => out.push_str(record_type),
            "sourceId" => out.push_str(source_id),
            "timestamp" => out.push_str(timestamp),
            other => {
                return Err(IngestError::Template {
                    template: template.into(),
                    reason: format!("unknown placeholder {{{other}}}"),
                })
            }
        }
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Iri::new(&out).map_err(|e| IngestError::Template {
        template: template.into(),
        reason: e.to_string(),
    })
}

/// Reads the JSON mapping config.
pub fn load_mapping(config: &[u8]) -> Result<Vec<MappingRule>, IngestError> {
    let de = &mut serde_json::Deserializer::from_slice(config);
    let file: MappingFile = serde_path_to_error::deserialize(de).map_err(|e| IngestError::Config {
        path: e.path().to_string(),
        reason: e.into_inner().to_string(),
    })?;
    let cfg = |path: String, reason: String| IngestError::Config { path, reason };
    let mut rules: Vec<MappingRule> = Vec::with_capacity(file.rules.len());
    for (i, r) in file.rules.into_iter().enumerate() {
        let path = format!("rules[{i}]");
        let record_type = RecordType::parse(&r.record_type)
            .ok_or_else(|| cfg(format!("{path}.recordType"), format!("unknown record type {:?}", r.record_type)))?;
        if rules.iter().any(|x| x.record_type == record_type) {
            return Err(IngestError::DuplicateRecordType(record_type));
        }
        let class_iri = Iri::new(&r.class_iri).map_err(|e| cfg(format!("{path}.classIri"), e.to_string()))?;
        let subject_template = r.subject_template.unwrap_or_else(|| DEFAULT_SUBJECT_TEMPLATE.to_string());
        render_template(&subject_template, record_type.name(), "probe", "2000-01-01T00:00:00Z")?;
        let mut fields: Vec<FieldMapping> = Vec::with_capacity(r.fields.len());
        for (j, f) in r.fields.into_iter().enumerate() {
            let fpath = format!("{path}.fields[{j}]");
            if fields.iter().any(|x| x.name == f.name) {
                return Err(cfg(fpath, format!("duplicate field name {:?}", f.name)));
            }
            let predicate = Iri::new(&f.predicate).map_err(|e| cfg(format!("{fpath}.predicate"), e.to_string()))?;
            let datatype = match f.datatype.as_deref() {
                None | Some("@id") => None,
                Some(dt) => Some(Iri::new(dt).map_err(|e| cfg(format!("{fpath}.datatype"), e.to_string()))?),
            };
            if f.unit.is_some() && datatype.is_none() {
                return Err(cfg(fpath, "IRI-valued fields cannot carry a unit".into()));
            }
            fields.push(FieldMapping {
                name: f.name,
                predicate,
                datatype,
                expected_unit: f.unit,
            });
        }
        // eldv:unit annotates the subject, so a record can carry only one
        // unit-bearing measurement.
        if fields.iter().filter(|f| f.expected_unit.is_some()).count() > 1 {
            return Err(cfg(path, "at most one field per rule may declare a unit".into()));
        }
        rules.push(MappingRule {
            record_type,
            class_iri,
            subject_template,
            fields,
        });
    }
    Ok(rules)
}

/// Converts one record to triples.
pub fn map_record(
    record: &EnergyRecord,
    rules: &[MappingRule],
    prov: &ProvenanceStamp,
) -> Result<MappedRecord, IngestError> {
    let rule = rules
        .iter()
        .find(|r| r.record_type == record.record_type)
        .ok_or(IngestError::NoRuleForType(record.record_type))?;
    let ts = format_timestamp(&record.timestamp);
    let subject = Term::Iri(render_template(
        &rule.subject_template,
        record.record_type.name(),
        &record.source_id,
        &ts,
    )?);
    let mut graph = Graph::new();
    let mut add = |p: Iri, o: Term| {
        graph.insert(Triple::new(subject.clone(), p, o).expect("IRI subject"));
    };
    add(ns::rdf::type_(), Term::Iri(rule.class_iri.clone()));
    let mut skipped = Vec::new();
    for field in &record.fields {
        let Some(mapping) = rule.fields.iter().find(|m| m.name == field.name) else {
            skipped.push((field.name.clone(), "no mapping"));
            continue;
        };
        if field.value.trim().is_empty() {
            skipped.push((field.name.clone(), "empty value"));
            continue;
        }
        let object = match &mapping.datatype {
            Some(dt) => Term::typed_literal(&field.value, dt.clone()),
            None => match Term::iri(field.value.trim()) {
                Ok(t) => t,
                Err(_) => {
                    skipped.push((field.name.clone(), "value is not an IRI"));
                    continue;
                }
            },
        };
        add(mapping.predicate.clone(), object);
        if let Some(unit) = &field.declared_unit {
            if mapping.expected_unit.is_some() {
                add(ns::eldv::unit(), Term::string_literal(unit));
            } else {
                skipped.push((format!("{}.unit", field.name), "field is not unit-bearing"));
            }
        }
    }
    add(ns::eldv::source(), Term::Iri(prov.source_iri.clone()));
    add(ns::eldv::generated_at(), datetime_literal(&prov.generated_at));
    add(ns::eldv::observed_at(), datetime_literal(&record.timestamp));
    Ok(MappedRecord { graph, skipped })
}

/// Maps every record, stamping each with its own source IRI and the shared
/// mapping time. Returns the merged graph and the total skip count.
pub fn map_records(
    records: &[EnergyRecord],
    rules: &[MappingRule],
    generated_at: DateTime<Utc>,
    agent: &str,
) -> Result<(Graph, usize), IngestError> {
    let mut graph = Graph::new();
    let mut skipped = 0;
    for record in records {
        let prov = ProvenanceStamp::for_source(&record.source_id, generated_at, agent)?;
        let mapped = map_record(record, rules, &prov)?;
        skipped += mapped.skipped.len();
        graph.merge(mapped.graph);
    }
    Ok((graph, skipped))
}

/// Classes and predicates the mapping declares, as a vocabulary graph.
pub fn mapping_vocab(rules: &[MappingRule]) -> Graph {
    let mut g = Graph::new();
    for r in rules {
        g.insert(
            Triple::new(Term::Iri(r.class_iri.clone()), ns::rdf::type_(), Term::Iri(ns::rdfs::class()))
                .expect("IRI subject"),
        );
        for f in &r.fields {
            g.insert(
                Triple::new(Term::Iri(f.predicate.clone()), ns::rdf::type_(), Term::Iri(ns::rdf::property()))
                    .expect("IRI subject"),
            );
        }
    }
    g
}

// ---- record readers --------------------------------------------------------

const RESERVED: [&str; 3] = ["recordType", "sourceId", "timestamp"];

fn assemble(index: usize, raw: BTreeMap<String, String>, order: &[String]) -> Result<EnergyRecord, IngestError> {
    let err = |reason: String| IngestError::Record { index, reason };
    let get = |k: &str| raw.get(k).map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
    let rt = get("recordType").ok_or_else(|| err("missing recordType".into()))?;
    let record_type = RecordType::parse(&rt).ok_or_else(|| err(format!("unknown recordType {rt:?}")))?;
    let source_id = get("sourceId").ok_or_else(|| err("missing sourceId".into()))?;
    let ts = get("timestamp").ok_or_else(|| err("missing timestamp".into()))?;
    let timestamp = parse_timestamp(&ts).ok_or_else(|| err(format!("timestamp {ts:?} is not ISO-8601")))?;
    let mut fields = Vec::new();
    for name in order {
        if RESERVED.contains(&name.as_str()) || name.ends_with(".unit") {
            continue;
        }
        let value = raw.get(name).cloned().unwrap_or_default();
        let declared_unit = raw
            .get(&format!("{name}.unit"))
            .map(|u| u.trim().to_string())
            .filter(|u| !u.is_empty());
        fields.push(FieldValue {
            name: name.clone(),
            value,
            declared_unit,
        });
    }
    Ok(EnergyRecord {
        record_type,
        source_id,
        timestamp,
        fields,
    })
}

/// CSV with required columns `recordType`, `sourceId`, `timestamp`; every
/// other column is a field, and a `<field>.unit` column carries its unit.
pub fn read_records_csv(input: &[u8]) -> Result<Vec<EnergyRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Record { index: 0, reason: e.to_string() })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    for required in RESERVED {
        if !headers.iter().any(|h| h == required) {
            return Err(IngestError::Record {
                index: 0,
                reason: format!("missing required column {required}"),
            });
        }
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| IngestError::Record { index: i, reason: e.to_string() })?;
        let raw: BTreeMap<String, String> = headers
            .iter()
            .cloned()
            .zip(row.iter().map(str::to_string))
            .collect();
        // A field column left empty on this row is simply absent.
        let order: Vec<String> = headers
            .iter()
            .filter(|h| raw.get(*h).is_some_and(|v| !v.is_empty()))
            .cloned()
            .collect();
        out.push(assemble(i, raw, &order)?);
    }
    Ok(out)
}

/// JSON array of flat objects with the same keys as the CSV columns.
pub fn read_records_json(input: &[u8]) -> Result<Vec<EnergyRecord>, IngestError> {
    let rows: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_slice(input).map_err(|e| IngestError::Record { index: 0, reason: e.to_string() })?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let mut raw = BTreeMap::new();
        let mut order = Vec::new();
        for (k, v) in row {
            let text = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                serde_json::Value::Null => continue,
                other => {
                    return Err(IngestError::Record {
                        index: i,
                        reason: format!("field {k:?} must be a scalar, got {other}"),
                    })
                }
            };
            order.push(k.clone());
            raw.insert(k, text);
        }
        out.push(assemble(i, raw, &order)?);
    }
    Ok(out)
}

/// Writes records as CSV: the reserved columns, then `columns` in order,
/// each followed by its `.unit` column when any record carries a unit for it.
pub fn write_records_csv(records: &[EnergyRecord], columns: &[&str]) -> Vec<u8> {
    let with_unit: Vec<bool> = columns
        .iter()
        .map(|c| records.iter().any(|r| r.field(c).is_some_and(|f| f.declared_unit.is_some())))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
    for (c, u) in columns.iter().zip(&with_unit) {
        header.push(c.to_string());
        if *u {
            header.push(format!("{c}.unit"));
        }
    }
    w.write_record(&header).expect("in-memory write");
    for r in records {
        let mut row = vec![
            r.record_type.name().to_string(),
            r.source_id.clone(),
            format_timestamp(&r.timestamp),
        ];
        for (c, u) in columns.iter().zip(&with_unit) {
            let f = r.field(c);
            row.push(f.map(|f| f.value.clone()).unwrap_or_default());
            if *u {
                row.push(f.and_then(|f| f.declared_unit.clone()).unwrap_or_default());
            }
        }
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

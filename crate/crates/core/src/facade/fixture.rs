//! Seeded synthetic energy datasets with injected defects and a manifest of
//! what was injected where.
//!
//! Every series source (meter, inverter, sensor) is tied to one building, so
//! the pair (source, building) forms a confidence-1 pattern that rule mining
//! can recover when a building link is removed.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ingest::{
    format_timestamp, load_mapping, map_records, write_records_csv, EnergyRecord, FieldValue, MappingRule,
    RecordType,
};
use crate::numeric::{format_decimal, from_f64_decimal, int, round_half_even, Rational};
use crate::rdf::Graph;
use crate::vocab::{load_policy, ns, QualityPolicy};

pub const ENERGY_NS: &str = "https://w3id.org/ldq/energy#";
pub const BUILDING_BASE: &str = "https://w3id.org/ldq/energy/building/";

/// Appliance labels; pairwise similarity stays under 0.85 so only injected
/// variants cluster.
pub const APPLIANCES: [&str; 15] = [
    "fridge",
    "washing machine",
    "dishwasher",
    "heat pump",
    "water heater",
    "oven",
    "television",
    "air conditioner",
    "tumble dryer",
    "microwave",
    "chest freezer",
    "lighting",
    "ev charger",
    "router",
    "vacuum robot",
];

const CSV_COLUMNS: [&str; 7] = [
    "energy",
    "building",
    "occupants",
    "temperature",
    "label",
    "ratedPower",
    "householdRole",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DefectKind {
    MissingObject,
    Duplicate,
    WrongUnit,
    NameVariant,
    StaleTimestamp,
    Outlier,
}

impl DefectKind {
    pub const ALL: [DefectKind; 6] = [
        DefectKind::MissingObject,
        DefectKind::Duplicate,
        DefectKind::WrongUnit,
        DefectKind::NameVariant,
        DefectKind::StaleTimestamp,
        DefectKind::Outlier,
    ];
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("rate for {kind:?} is {rate}, outside [0, 1]")]
    RateOutOfRange { kind: DefectKind, rate: f64 },
    #[error("at most {max} appliances are supported, got {got}")]
    TooManyAppliances { max: usize, got: usize },
    #[error("need at least one building and one hour")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Generator input. `counts` is the number of sources per series type and
/// the number of entities for BuildingInfo (appliances) and Dweller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct FixtureConfig {
    pub seed: u64,
    pub hours: u32,
    pub buildings: usize,
    pub counts: BTreeMap<RecordType, usize>,
    pub rates: BTreeMap<DefectKind, f64>,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        let counts = [
            (RecordType::Consumption, 4),
            (RecordType::Generation, 2),
            (RecordType::BuildingInfo, 9),
            (RecordType::Occupancy, 3),
            (RecordType::Dweller, 6),
            (RecordType::Weather, 1),
            (RecordType::Environment, 3),
        ];
        FixtureConfig {
            seed: 42,
            hours: 24,
            buildings: 3,
            counts: counts.into_iter().collect(),
            rates: BTreeMap::new(),
        }
    }
}

impl FixtureConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rate(mut self, kind: DefectKind, rate: f64) -> Self {
        self.rates.insert(kind, rate);
        self
    }

    pub fn start(&self) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2024, 5, 1, 0, 0, 0).unwrap()
    }

    /// The assessment clock written into the rules: one hour past the last
    /// series slot.
    pub fn reference_time(&self) -> DateTime<Utc> {
        self.start() + Duration::hours(self.hours as i64)
    }

    fn count(&self, t: RecordType) -> usize {
        self.counts.get(&t).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundTruth {
    /// Row in `records.csv`.
    pub record_index: usize,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injected: Option<String>,
    /// Method expected to repair the defect, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recoverable_by: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InjectedDefect {
    pub kind: DefectKind,
    /// Exact decimal text of the rate.
    pub rate: String,
    /// Size of the population the rate was applied to.
    pub population: usize,
    pub ground_truth: Vec<GroundTruth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureManifest {
    pub seed: u64,
    pub hours: u32,
    pub buildings: usize,
    /// Records per type, defects included.
    pub counts: BTreeMap<RecordType, usize>,
    pub injected_defects: Vec<InjectedDefect>,
}

impl FixtureManifest {
    pub fn defect(&self, kind: DefectKind) -> Option<&InjectedDefect> {
        self.injected_defects.iter().find(|d| d.kind == kind)
    }

    pub fn ground_truth(&self, kind: DefectKind) -> &[GroundTruth] {
        self.defect(kind).map(|d| d.ground_truth.as_slice()).unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub config: FixtureConfig,
    pub records: Vec<EnergyRecord>,
    pub manifest: FixtureManifest,
    pub mapping: Value,
    pub assessment: Value,
    pub rules: Value,
}

fn class_of(t: RecordType) -> &'static str {
    match t {
        RecordType::Consumption => "Consumption",
        RecordType::Generation => "Generation",
        RecordType::BuildingInfo => "Appliance",
        RecordType::Occupancy => "Occupancy",
        RecordType::Dweller => "Dweller",
        RecordType::Weather => "WeatherObservation",
        RecordType::Environment => "EnvironmentObservation",
    }
}

fn source_prefix(t: RecordType) -> &'static str {
    match t {
        RecordType::Consumption => "meter",
        RecordType::Generation => "pv",
        RecordType::BuildingInfo => "appl",
        RecordType::Occupancy => "occ",
        RecordType::Dweller => "dweller",
        RecordType::Weather => "wx",
        RecordType::Environment => "env",
    }
}

fn is_series(t: RecordType) -> bool {
    !matches!(t, RecordType::BuildingInfo | RecordType::Dweller)
}

/// Predicate IRI of a record field.
pub fn field_predicate(field: &str) -> String {
    match field {
        "label" => ns::rdfs::LABEL.to_string(),
        other => format!("{ENERGY_NS}{other}"),
    }
}

pub fn building_iri(index: usize) -> String {
    format!("{BUILDING_BASE}B{}", index + 1)
}

/// Subject IRI the default template gives a record.
pub fn subject_of(r: &EnergyRecord) -> String {
    format!(
        "urn:ldq:{}:{}:{}",
        r.record_type.name(),
        r.source_id,
        format_timestamp(&r.timestamp)
    )
}

fn field(name: &str, value: String, unit: Option<&str>) -> FieldValue {
    FieldValue {
        name: name.to_string(),
        value,
        declared_unit: unit.map(str::to_string),
    }
}

fn noise(rng: &mut ChaCha8Rng, amp: f64) -> f64 {
    rng.random_range(-amp..=amp)
}

fn clean_records(cfg: &FixtureConfig, rng: &mut ChaCha8Rng) -> Vec<EnergyRecord> {
    let t0 = cfg.start();
    let mut out = Vec::new();
    for t in RecordType::ALL {
        #[allow(clippy::needless_range_loop)]
        for k in 0..cfg.count(t) {
            let source_id = format!("{}-{:02}", source_prefix(t), k + 1);
            let building = building_iri(k % cfg.buildings);
            if !is_series(t) {
                let fields = match t {
                    RecordType::BuildingInfo => vec![
                        field("building", building, None),
                        field("label", APPLIANCES[k].to_string(), None),
                        field("ratedPower", format!("{:.2}", rng.random_range(0.1..3.0)), Some("kW")),
                    ],
                    _ => {
                        let role = ["adult", "child", "senior"][rng.random_range(0..3)];
                        vec![
                            field("building", building, None),
                            field("householdRole", role.to_string(), None),
                        ]
                    }
                };
                out.push(EnergyRecord {
                    record_type: t,
                    source_id,
                    timestamp: t0,
                    fields,
                });
                continue;
            }
            for h in 0..cfg.hours {
                let hf = h as f64;
                let day = (h % 24) as f64;
                let fields = match t {
                    RecordType::Consumption => {
                        let v = 2.0 + 0.01 * hf + 0.6 * (2.0 * PI * (day - 6.0) / 24.0).sin() + 0.1 * k as f64
                            + noise(rng, 0.03);
                        vec![
                            field("building", building.clone(), None),
                            field("energy", format!("{v:.3}"), Some("kWh")),
                        ]
                    }
                    RecordType::Generation => {
                        let sun = (PI * (day - 6.0) / 12.0).sin().max(0.0);
                        let v = 1.5 * sun + noise(rng, 0.02).abs();
                        vec![
                            field("building", building.clone(), None),
                            field("energy", format!("{v:.3}"), Some("kWh")),
                        ]
                    }
                    RecordType::Occupancy => {
                        let base = if (8.0..18.0).contains(&day) { 1 } else { 3 };
                        vec![
                            field("building", building.clone(), None),
                            field("occupants", (base + rng.random_range(0..=1)).to_string(), None),
                        ]
                    }
                    RecordType::Weather => {
                        let v = 14.0 + 6.0 * (2.0 * PI * (day - 9.0) / 24.0).sin() + noise(rng, 0.3);
                        vec![field("temperature", format!("{v:.2}"), Some("°C"))]
                    }
                    _ => {
                        let v = 21.0 + 1.5 * (2.0 * PI * (day - 14.0) / 24.0).sin() + noise(rng, 0.2);
                        vec![
                            field("building", building.clone(), None),
                            field("temperature", format!("{v:.2}"), Some("°C")),
                        ]
                    }
                };
                out.push(EnergyRecord {
                    record_type: t,
                    source_id: source_id.clone(),
                    timestamp: t0 + Duration::hours(h as i64),
                    fields,
                });
            }
        }
    }
    out
}

fn count_for(rate: &Rational, population: usize) -> usize {
    let n = round_half_even(&(rate * int(population as i64)));
    usize::try_from(n).unwrap_or(0).min(population)
}

/// `amount` distinct positions of `candidates`, in ascending order.
fn pick<T: Copy>(rng: &mut ChaCha8Rng, candidates: &[T], amount: usize) -> Vec<T> {
    let mut idx = sample(rng, candidates.len(), amount.min(candidates.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| candidates[i]).collect()
}

fn wrong_unit_for(unit: &str) -> &'static str {
    match unit {
        "°C" | "K" => "kWh",
        _ => "°C",
    }
}

fn variant_label(label: &str) -> String {
    format!("{}.", label.to_uppercase())
}

fn method(local: &str) -> Option<String> {
    Some(format!("{}{local}", ns::eldv::NS))
}

struct Injector<'a> {
    rng: ChaCha8Rng,
    records: Vec<EnergyRecord>,
    touched: BTreeSet<usize>,
    defects: Vec<InjectedDefect>,
    rates: &'a BTreeMap<DefectKind, Rational>,
}

impl Injector<'_> {
    fn rate(&self, kind: DefectKind) -> Rational {
        self.rates.get(&kind).cloned().unwrap_or_else(|| int(0))
    }

    fn record(&mut self, kind: DefectKind, population: usize, ground_truth: Vec<GroundTruth>) {
        self.defects.push(InjectedDefect {
            kind,
            rate: format_decimal(&self.rate(kind), 12),
            population,
            ground_truth,
        });
    }

    fn missing_objects(&mut self) {
        let slots: Vec<(usize, usize)> = self
            .records
            .iter()
            .enumerate()
            .flat_map(|(i, r)| (0..r.fields.len()).map(move |j| (i, j)))
            .collect();
        let amount = count_for(&self.rate(DefectKind::MissingObject), slots.len());
        let chosen = pick(&mut self.rng, &slots, amount);
        let mut truth = Vec::new();
        let mut removals: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (i, j) in chosen {
            let r = &self.records[i];
            let f = &r.fields[j];
            let recoverable_by = if !is_series(r.record_type) {
                None
            } else if f.name == "building" {
                method("associationRuleMining")
            } else {
                method("supportVectorRegression")
            };
            truth.push(GroundTruth {
                record_index: i,
                subject: subject_of(r),
                field: Some(f.name.clone()),
                predicate: Some(field_predicate(&f.name)),
                original: Some(f.value.clone()),
                injected: None,
                recoverable_by,
            });
            removals.entry(i).or_default().insert(j);
        }
        for (i, js) in removals {
            let r = &mut self.records[i];
            r.fields = r
                .fields
                .drain(..)
                .enumerate()
                .filter(|(j, _)| !js.contains(j))
                .map(|(_, f)| f)
                .collect();
            self.touched.insert(i);
        }
        self.record(DefectKind::MissingObject, slots.len(), truth);
    }

    fn untouched_series(&self, pred: impl Fn(&EnergyRecord) -> bool) -> Vec<usize> {
        (0..self.records.len())
            .filter(|i| !self.touched.contains(i))
            .filter(|i| is_series(self.records[*i].record_type) && pred(&self.records[*i]))
            .collect()
    }

    fn wrong_units(&mut self) {
        let candidates = self.untouched_series(|r| r.fields.iter().any(|f| f.declared_unit.is_some()));
        let amount = count_for(&self.rate(DefectKind::WrongUnit), candidates.len());
        let mut truth = Vec::new();
        for i in pick(&mut self.rng, &candidates, amount) {
            let subject = subject_of(&self.records[i]);
            let f = self.records[i]
                .fields
                .iter_mut()
                .find(|f| f.declared_unit.is_some())
                .expect("filtered");
            let original = f.declared_unit.clone().expect("filtered");
            let wrong = wrong_unit_for(&original);
            f.declared_unit = Some(wrong.to_string());
            truth.push(GroundTruth {
                record_index: i,
                subject,
                field: Some(format!("{}.unit", f.name)),
                predicate: Some(ns::eldv::UNIT.to_string()),
                original: Some(original),
                injected: Some(wrong.to_string()),
                recoverable_by: method("etl"),
            });
            self.touched.insert(i);
        }
        self.record(DefectKind::WrongUnit, candidates.len(), truth);
    }

    fn stale_timestamps(&mut self) {
        let candidates = self.untouched_series(|_| true);
        let amount = count_for(&self.rate(DefectKind::StaleTimestamp), candidates.len());
        let mut truth = Vec::new();
        for i in pick(&mut self.rng, &candidates, amount) {
            let minutes = self.rng.random_range(1..=25);
            let r = &mut self.records[i];
            let original = r.timestamp;
            r.timestamp = original + Duration::minutes(minutes);
            truth.push(GroundTruth {
                record_index: i,
                subject: subject_of(r),
                field: Some("timestamp".into()),
                predicate: Some(ns::eldv::OBSERVED_AT.to_string()),
                original: Some(format_timestamp(&original)),
                injected: Some(format_timestamp(&r.timestamp)),
                recoverable_by: method("etl"),
            });
            self.touched.insert(i);
        }
        self.record(DefectKind::StaleTimestamp, candidates.len(), truth);
    }

    fn outliers(&mut self) {
        let candidates = self.untouched_series(|r| {
            r.record_type != RecordType::Generation && r.field("energy").or(r.field("temperature")).is_some()
        });
        let amount = count_for(&self.rate(DefectKind::Outlier), candidates.len());
        let mut truth = Vec::new();
        for i in pick(&mut self.rng, &candidates, amount) {
            let subject = subject_of(&self.records[i]);
            let f = self.records[i]
                .fields
                .iter_mut()
                .find(|f| f.name == "energy" || f.name == "temperature")
                .expect("filtered");
            let original = f.value.clone();
            let v: f64 = original.parse().expect("generated number");
            f.value = format!("{:.3}", v * 10.0);
            truth.push(GroundTruth {
                record_index: i,
                subject,
                field: Some(f.name.clone()),
                predicate: Some(field_predicate(&f.name)),
                original: Some(original),
                injected: Some(f.value.clone()),
                recoverable_by: method("etl"),
            });
            self.touched.insert(i);
        }
        self.record(DefectKind::Outlier, candidates.len(), truth);
    }

    fn name_variants(&mut self) {
        let candidates: Vec<usize> = (0..self.records.len())
            .filter(|i| self.records[*i].record_type == RecordType::BuildingInfo && !self.touched.contains(i))
            .filter(|i| self.records[*i].field("label").is_some())
            .collect();
        let amount = count_for(&self.rate(DefectKind::NameVariant), candidates.len());
        let mut truth = Vec::new();
        for i in pick(&mut self.rng, &candidates, amount) {
            let mut copy = self.records[i].clone();
            copy.source_id = format!("{}-v", copy.source_id);
            let label = copy.fields.iter_mut().find(|f| f.name == "label").expect("filtered");
            label.value = variant_label(&label.value);
            let injected = label.value.clone();
            truth.push(GroundTruth {
                record_index: self.records.len(),
                subject: subject_of(&copy),
                field: Some("label".into()),
                predicate: Some(ns::rdfs::LABEL.to_string()),
                original: Some(subject_of(&self.records[i])),
                injected: Some(injected),
                recoverable_by: method("clusteringDataInterlinking"),
            });
            self.records.push(copy);
        }
        self.record(DefectKind::NameVariant, candidates.len(), truth);
    }

    fn duplicates(&mut self) {
        let candidates: Vec<usize> = (0..self.records.len()).collect();
        let amount = count_for(&self.rate(DefectKind::Duplicate), candidates.len());
        let mut truth = Vec::new();
        for i in pick(&mut self.rng, &candidates, amount) {
            let copy = self.records[i].clone();
            truth.push(GroundTruth {
                record_index: self.records.len(),
                subject: subject_of(&copy),
                field: None,
                predicate: None,
                original: Some(i.to_string()),
                injected: None,
                recoverable_by: method("etl"),
            });
            self.records.push(copy);
        }
        self.record(DefectKind::Duplicate, candidates.len(), truth);
    }
}

/// Generates a fixture. A pure function of the config.
pub fn gen_fixture(cfg: &FixtureConfig) -> Result<Fixture, FixtureError> {
    if cfg.buildings == 0 || cfg.hours == 0 {
        return Err(FixtureError::Empty);
    }
    let appliances = cfg.count(RecordType::BuildingInfo);
    if appliances > APPLIANCES.len() {
        return Err(FixtureError::TooManyAppliances {
            max: APPLIANCES.len(),
            got: appliances,
        });
    }
    let mut rates = BTreeMap::new();
    for (kind, rate) in &cfg.rates {
        if !(0.0..=1.0).contains(rate) {
            return Err(FixtureError::RateOutOfRange { kind: *kind, rate: *rate });
        }
        rates.insert(*kind, from_f64_decimal(*rate).expect("finite"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let records = clean_records(cfg, &mut rng);
    let mut inj = Injector {
        rng,
        records,
        touched: BTreeSet::new(),
        defects: Vec::new(),
        rates: &rates,
    };
    inj.missing_objects();
    inj.wrong_units();
    inj.stale_timestamps();
    inj.outliers();
    inj.name_variants();
    inj.duplicates();
    let mut defects = inj.defects;
    defects.sort_by_key(|d| d.kind);

    let mut counts: BTreeMap<RecordType, usize> = RecordType::ALL.iter().map(|t| (*t, 0)).collect();
    for r in &inj.records {
        *counts.entry(r.record_type).or_default() += 1;
    }
    let manifest = FixtureManifest {
        seed: cfg.seed,
        hours: cfg.hours,
        buildings: cfg.buildings,
        counts,
        injected_defects: defects,
    };
    Ok(Fixture {
        config: cfg.clone(),
        records: inj.records,
        manifest,
        mapping: mapping_json(),
        assessment: assessment_json(),
        rules: rules_json(cfg),
    })
}

pub fn mapping_json() -> Value {
    let e = |local: &str| format!("{ENERGY_NS}{local}");
    let building = json!({"name": "building", "predicate": e("building"), "datatype": "@id"});
    let energy = json!({"name": "energy", "predicate": e("energy"), "datatype": ns::xsd::DECIMAL, "unit": "kWh"});
    let temperature =
        json!({"name": "temperature", "predicate": e("temperature"), "datatype": ns::xsd::DECIMAL, "unit": "°C"});
    let rule = |t: RecordType, fields: Vec<Value>| {
        json!({"recordType": t.name(), "classIri": e(class_of(t)), "fields": fields})
    };
    json!({"rules": [
        rule(RecordType::Consumption, vec![energy.clone(), building.clone()]),
        rule(RecordType::Generation, vec![energy, building.clone()]),
        rule(RecordType::BuildingInfo, vec![
            json!({"name": "label", "predicate": ns::rdfs::LABEL, "datatype": ns::xsd::STRING}),
            building.clone(),
            json!({"name": "ratedPower", "predicate": e("ratedPower"), "datatype": ns::xsd::DECIMAL, "unit": "kW"}),
        ]),
        rule(RecordType::Occupancy, vec![
            json!({"name": "occupants", "predicate": e("occupants"), "datatype": ns::xsd::INTEGER}),
            building.clone(),
        ]),
        rule(RecordType::Dweller, vec![
            building.clone(),
            json!({"name": "householdRole", "predicate": e("householdRole"), "datatype": ns::xsd::STRING}),
        ]),
        rule(RecordType::Weather, vec![temperature.clone()]),
        rule(RecordType::Environment, vec![temperature, building]),
    ]})
}

pub fn assessment_json() -> Value {
    let e = |local: &str| format!("{ENERGY_NS}{local}");
    let building = json!({"predicate": e("building"), "datatype": "@id", "functional": true});
    // ranges are in canonical units: joule, watt, kelvin
    let energy = json!({"predicate": e("energy"), "datatype": ns::xsd::DECIMAL, "unitDimension": "energy",
        "functional": true, "range": [0, 36_000_000]});
    let temperature = json!({"predicate": e("temperature"), "datatype": ns::xsd::DECIMAL,
        "unitDimension": "temperature", "functional": true, "range": [233.15, 323.15]});
    let shape = |t: RecordType, preds: Vec<Value>| json!({"classIri": e(class_of(t)), "predicates": preds});
    let metric = |id: &str, category: &str| json!({"id": id, "category": category});
    json!({
        "taskId": "energy-monitoring",
        "metrics": [
            {"id": "availability", "category": "accessibility", "params": {"sampleSize": 100}},
            metric("interlinking", "accessibility"),
            metric("completeness", "intrinsic"),
            metric("consistency", "intrinsic"),
            metric("semanticAccuracy", "intrinsic"),
            metric("compactness", "intrinsic"),
            metric("interpretability", "rdfLevel"),
            metric("interoperability", "rdfLevel"),
            metric("provenance", "taskDependent"),
            metric("freshness", "taskDependent"),
            metric("usability", "taskDependent"),
        ],
        "shapes": [
            shape(RecordType::Consumption, vec![energy.clone(), building.clone()]),
            shape(RecordType::Generation, vec![energy, building.clone()]),
            shape(RecordType::BuildingInfo, vec![
                json!({"predicate": ns::rdfs::LABEL, "datatype": ns::xsd::STRING}),
                building.clone(),
                json!({"predicate": e("ratedPower"), "datatype": ns::xsd::DECIMAL, "unitDimension": "power",
                    "functional": true, "range": [0, 20_000]}),
            ]),
            shape(RecordType::Occupancy, vec![
                json!({"predicate": e("occupants"), "datatype": ns::xsd::INTEGER, "functional": true, "range": [0, 50]}),
                building.clone(),
            ]),
            shape(RecordType::Dweller, vec![
                building.clone(),
                json!({"predicate": e("householdRole"), "datatype": ns::xsd::STRING}),
            ]),
            shape(RecordType::Weather, vec![temperature.clone()]),
            shape(RecordType::Environment, vec![temperature, building]),
        ],
    })
}

pub fn rules_json(cfg: &FixtureConfig) -> Value {
    let mut probe = serde_json::Map::new();
    let iris = (0..cfg.buildings)
        .map(building_iri)
        .chain(RecordType::ALL.iter().map(|t| format!("{ENERGY_NS}{}", class_of(*t))));
    for (i, iri) in iris.enumerate() {
        probe.insert(iri, json!({"status": 200, "latencyMs": 40 + 15 * i as u64}));
    }
    json!({
        "taskId": "energy-monitoring",
        "thresholds": {
            "availability": 0.9,
            "completeness": 0.98,
            "consistency": 0.98,
            "semanticAccuracy": 0.98,
            "compactness": 0.99,
            "interpretability": 0.9,
            "interoperability": 0.9,
            "provenance": 0.95,
        },
        "categoryThresholds": {
            "accessibility": 0.5,
            "intrinsic": 0.95,
            "rdfLevel": 0.9,
            "taskDependent": 0.5,
        },
        "maxAgeSeconds": 2 * cfg.hours as u64 * 3600,
        "standardNamespaces": [ns::rdf::NS, ns::rdfs::NS, ns::xsd::NS, ns::owl::NS, ns::dqv::NS, ns::eldv::NS, ENERGY_NS],
        "linkingPredicates": [ns::owl::SAME_AS, ns::rdfs::SEE_ALSO, format!("{ENERGY_NS}building")],
        "maxRounds": 3,
        "usabilityWeights": {"completeness": 2, "consistency": 1, "semanticAccuracy": 1},
        "improvement": {
            "minSupport": 0.04,
            "minConfidence": 1.0,
            "tau": 0.85,
            "gridSeconds": 3600,
            "labelPredicate": ns::rdfs::LABEL,
        },
        "referenceTime": format_timestamp(&cfg.reference_time()),
        "probe": probe,
    })
}

fn pretty(v: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

impl Fixture {
    pub fn mapping_rules(&self) -> Vec<MappingRule> {
        load_mapping(&pretty(&self.mapping)).expect("generated mapping is valid")
    }

    pub fn policy(&self) -> QualityPolicy {
        load_policy(&pretty(&self.assessment), &pretty(&self.rules)).expect("generated policy is valid")
    }

    /// The records mapped to RDF, stamped at the reference time.
    pub fn graph(&self) -> Graph {
        map_records(&self.records, &self.mapping_rules(), self.config.reference_time(), super::INGEST_AGENT)
            .expect("generated records map")
            .0
    }

    /// N-Triples with one block per record, so duplicated records show up
    /// as repeated statements.
    pub fn dataset_ntriples(&self) -> Vec<u8> {
        super::records_to_ntriples(&self.records, &self.mapping_rules(), self.config.reference_time())
            .expect("generated records map")
    }

    pub fn records_csv(&self) -> Vec<u8> {
        write_records_csv(&self.records, &CSV_COLUMNS)
    }

    /// Files written by [`Fixture::write_to`], as (name, bytes).
    pub fn files(&self) -> Vec<(&'static str, Vec<u8>)> {
        vec![
            ("records.csv", self.records_csv()),
            ("dataset.nt", self.dataset_ntriples()),
            ("mapping.json", pretty(&self.mapping)),
            ("assessment.json", pretty(&self.assessment)),
            ("rules.json", pretty(&self.rules)),
            ("manifest.json", pretty(&self.manifest)),
        ]
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), FixtureError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in self.files() {
            fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}

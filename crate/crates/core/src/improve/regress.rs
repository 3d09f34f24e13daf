use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, Utc};

use super::svr::{train_svr, RegressionModel, MIN_POINTS};
use super::{ActionKind, ImprovementAction};
use crate::assess::metrics::Index;
use crate::ingest::format_timestamp;
use crate::numeric::{format_fixed, from_f64, int, round_half_even, to_f64, Rational};
use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::datatypes::{numeric_value, parse_datetime};
use crate::vocab::{ns, ShapeRequirement, SvrHyper};

pub const FILL_DIGITS: usize = 6;

/// Nearest grid offset from `origin`; a value exactly between two slots
/// goes to the earlier one.
pub fn nearest_slot(t: &DateTime<Utc>, origin: &DateTime<Utc>, grid_seconds: u64) -> i64 {
    let d = (*t - *origin).num_milliseconds();
    let g = grid_seconds as i64 * 1000;
    let q = d.div_euclid(g);
    let r = d.rem_euclid(g);
    if 2 * r > g {
        q + 1
    } else {
        q
    }
}

struct Member<'a> {
    subject: &'a Term,
    at: DateTime<Utc>,
}

fn encode(s: &str) -> String {
    s.bytes()
        .map(|b| {
            if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_') {
                (b as char).to_string()
            } else {
                format!("%{b:02X}")
            }
        })
        .collect()
}

fn minted_subject(source: &Iri, class: &Iri, at: &DateTime<Utc>) -> Term {
    Term::iri(format!(
        "urn:ldq:filled:{}:{}:{}",
        encode(source.as_str()),
        encode(class.as_str()),
        encode(&format_timestamp(at))
    ))
    .expect("encoded IRI")
}

/// Exact linear interpolation between the nearest points on each side.
fn interpolate(points: &[(DateTime<Utc>, Rational)], at: &DateTime<Utc>) -> Option<Rational> {
    let before = points.iter().filter(|p| p.0 <= *at).max_by_key(|p| p.0)?;
    let after = points.iter().filter(|p| p.0 >= *at).min_by_key(|p| p.0)?;
    if before.0 == after.0 {
        return Some(before.1.clone());
    }
    let span = int((after.0 - before.0).num_milliseconds());
    let offset = int((*at - before.0).num_milliseconds());
    Some(&before.1 + (&after.1 - &before.1) * offset / span)
}

fn annotate(action: &mut ImprovementAction, s: &Term) {
    action.additions.insert(
        Triple::new(s.clone(), ns::eldv::imputed_by(), Term::Iri(ns::eldv::support_vector_regression()))
            .expect("non-literal subject"),
    );
}

/// Fills missing slots of each (source, class, numeric predicate) series on
/// a regular grid starting at the earliest observation. A slot held by a
/// record lacking the value gets the value added, plus the group's most common unit
/// when the record has none; an empty slot gets a new record.
pub fn regress_fill(g: &Graph, shapes: &[ShapeRequirement], grid_seconds: u64, hyper: &SvrHyper) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::RegressFill, ns::eldv::support_vector_regression());
    let index = Index::new(g);
    let (source_p, observed_p) = (ns::eldv::source(), ns::eldv::observed_at());
    let mut groups: BTreeMap<(&Iri, &Iri), Vec<Member>> = BTreeMap::new();
    let mut shape_of: BTreeMap<&Iri, &ShapeRequirement> = BTreeMap::new();
    for (s, shape) in index.shaped_instances(shapes) {
        let Some(source) = index.values(s, &source_p).find_map(Term::as_iri) else {
            continue;
        };
        let Some(at) = index
            .values(s, &observed_p)
            .filter_map(Term::as_literal)
            .find_map(|l| parse_datetime(l.lexical()))
        else {
            continue;
        };
        shape_of.insert(&shape.class_iri, shape);
        groups.entry((source, &shape.class_iri)).or_default().push(Member { subject: s, at });
    }

    let mut minted: BTreeSet<Term> = BTreeSet::new();
    for ((source, class), members) in &groups {
        let origin = members.iter().map(|m| m.at).min().expect("nonempty group");
        let last = members.iter().map(|m| m.at).max().expect("nonempty group");
        let slots = nearest_slot(&last, &origin, grid_seconds);
        let generated = members
            .iter()
            .flat_map(|m| index.values(m.subject, &ns::eldv::generated_at()))
            .max()
            .cloned();
        // most common unit of the group, ties to the smaller symbol
        let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
        for u in members.iter().filter_map(|m| index.unit(m.subject)) {
            *tally.entry(u).or_default() += 1;
        }
        let unit = tally
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(u, _)| *u);
        for req in shape_of[class].required.iter().filter(|r| r.is_numeric()) {
            let mut points: Vec<(DateTime<Utc>, Rational)> = Vec::new();
            let mut present = BTreeSet::new();
            let mut holders: BTreeMap<i64, &Term> = BTreeMap::new();
            for m in members {
                let slot = nearest_slot(&m.at, &origin, grid_seconds);
                let value = index
                    .values(m.subject, &req.predicate)
                    .find_map(|o| o.as_literal().and_then(numeric_value));
                match value {
                    Some(v) => {
                        present.insert(slot);
                        // flagged outliers and off-unit values hold their slot but do not train
                        let on_unit = index.unit(m.subject).is_none_or(|u| Some(u) == unit);
                        if on_unit && !index.is_flagged(m.subject) {
                            points.push((m.at, v));
                        }
                    }
                    None => {
                        holders.entry(slot).or_insert(m.subject);
                    }
                }
            }
            if points.len() < 2 {
                continue;
            }
            points.sort_by_key(|p| p.0);
            let mut model: Option<Option<RegressionModel>> = None;
            for slot in (0..=slots).filter(|k| !present.contains(k)) {
                let at = origin + Duration::seconds(slot * grid_seconds as i64);
                let (value, how) = if points.len() >= MIN_POINTS {
                    let floats: Vec<(DateTime<Utc>, f64)> = points.iter().map(|(t, v)| (*t, to_f64(v))).collect();
                    let m = model.get_or_insert_with(|| train_svr(&floats, hyper).ok());
                    match m.as_ref().and_then(|m| from_f64(m.predict(&at))) {
                        Some(v) => (v, "svr"),
                        None => continue,
                    }
                } else {
                    match interpolate(&points, &at) {
                        Some(v) => (v, "interpolation"),
                        None => continue,
                    }
                };
                let literal = match &req.datatype {
                    Some(dt) if ns::xsd::is_integer_type(dt.as_str()) => {
                        Term::typed_literal(round_half_even(&value).to_string(), dt.clone())
                    }
                    _ => Term::typed_literal(format_fixed(&value, FILL_DIGITS), ns::xsd::decimal()),
                };
                let subject = match holders.get(&slot) {
                    Some(s) => {
                        if let (Some(unit), None) = (unit, index.unit(s)) {
                            action.additions.insert(
                                Triple::new((*s).clone(), ns::eldv::unit(), Term::string_literal(unit))
                                    .expect("IRI subject"),
                            );
                        }
                        (*s).clone()
                    }
                    None => {
                        let s = minted_subject(source, class, &at);
                        if minted.insert(s.clone()) {
                            let mut add = |p: Iri, o: Term| {
                                action.additions.insert(Triple::new(s.clone(), p, o).expect("IRI subject"));
                            };
                            add(ns::rdf::type_(), Term::Iri((*class).clone()));
                            add(ns::eldv::source(), Term::Iri((*source).clone()));
                            add(
                                ns::eldv::observed_at(),
                                Term::typed_literal(format_timestamp(&at), ns::xsd::date_time()),
                            );
                            if let Some(gen) = &generated {
                                add(ns::eldv::generated_at(), gen.clone());
                            }
                            if let Some(unit) = unit {
                                add(ns::eldv::unit(), Term::string_literal(unit));
                            }
                        }
                        s
                    }
                };
                action
                    .additions
                    .insert(Triple::new(subject.clone(), req.predicate.clone(), literal.clone()).expect("IRI subject"));
                annotate(&mut action, &subject);
                action.justification.push(format!(
                    "{subject} {} = {} at {} ({how})",
                    req.predicate,
                    literal,
                    format_timestamp(&at)
                ));
            }
        }
    }
    action
}

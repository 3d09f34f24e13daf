//! Extract-transform-load repairs: unit normalization, timestamp
//! alignment, outlier flagging and deduplication.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, Utc};

use super::regress::nearest_slot;
use super::{apply_action, ActionKind, ImprovementAction};
use crate::assess::metrics::{numeric_observations, Index};
use crate::ingest::format_timestamp;
use crate::numeric::format_decimal;
use crate::rdf::{Graph, Term, Triple};
use crate::vocab::datatypes::{numeric_value, parse_datetime};
use crate::vocab::{ns, Dimension, ShapeRequirement, UnitTable};

/// Digits kept when a converted value has no finite decimal expansion.
pub const CONVERTED_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EtlStep {
    UnitNormalize,
    AlignTimestamp,
    FlagOutlier,
    Dedupe,
}

impl EtlStep {
    pub const ALL: [EtlStep; 4] = [
        EtlStep::UnitNormalize,
        EtlStep::AlignTimestamp,
        EtlStep::FlagOutlier,
        EtlStep::Dedupe,
    ];
}

fn triple(s: &Term, p: crate::rdf::Iri, o: Term) -> Triple {
    Triple::new(s.clone(), p, o).expect("non-literal subject")
}

fn etl_mark(s: &Term) -> Triple {
    triple(s, ns::eldv::imputed_by(), Term::Iri(ns::eldv::etl()))
}

/// Rewrites unit-annotated values into the canonical unit of the shape's
/// dimension. A unit of the wrong dimension is relabeled to the most common
/// valid unit among instances of the same class and source, when there is
/// one; otherwise the value is left alone and reported.
pub fn unit_normalize(g: &Graph, shapes: &[ShapeRequirement], units: &UnitTable) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::UnitNormalize, ns::eldv::etl());
    let index = Index::new(g);
    let instances = index.shaped_instances(shapes);
    let source_of = |s: &Term| index.values(s, &ns::eldv::source()).next().cloned();

    // valid unit counts per (class, source, dimension)
    let mut tallies: BTreeMap<(&crate::rdf::Iri, Option<Term>, Dimension), BTreeMap<&str, usize>> = BTreeMap::new();
    for (s, shape) in &instances {
        let Some(dim) = shape.required.iter().find_map(|r| r.unit_dimension) else {
            continue;
        };
        if let Some(entry) = index.unit(s).and_then(|u| units.lookup(u)) {
            if entry.dimension == dim {
                *tallies
                    .entry((&shape.class_iri, source_of(s), dim))
                    .or_default()
                    .entry(entry.symbol)
                    .or_default() += 1;
            }
        }
    }

    for (s, shape) in &instances {
        let Some(req) = shape.required.iter().find(|r| r.unit_dimension.is_some() && r.is_numeric()) else {
            continue;
        };
        let dim = req.unit_dimension.expect("filtered");
        let Some(symbol) = index.unit(s) else {
            continue;
        };
        let canonical = units.canonical(dim).expect("every dimension has a canonical unit");
        let entry = match units.lookup(symbol) {
            Some(e) if e.dimension == dim => e,
            found => {
                let majority = tallies
                    .get(&(&shape.class_iri, source_of(s), dim))
                    .and_then(|t| t.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))))
                    .map(|(sym, _)| *sym);
                match majority.and_then(|m| units.lookup(m)) {
                    Some(e) => {
                        action.justification.push(format!("{s}: unit {symbol:?} relabeled {}", e.symbol));
                        e
                    }
                    None => {
                        let why = if found.is_none() { "unknown unit symbol" } else { "unit of wrong dimension" };
                        action.justification.push(format!("{s}: {why} {symbol:?}, left untouched"));
                        continue;
                    }
                }
            }
        };
        if entry.symbol == canonical.symbol && symbol == canonical.symbol {
            continue;
        }
        for o in index.values(s, &req.predicate) {
            let Some(v) = o.as_literal().and_then(numeric_value) else {
                continue;
            };
            let converted = &v * &entry.factor + &entry.offset;
            let lit = Term::typed_literal(format_decimal(&converted, CONVERTED_DIGITS), ns::xsd::decimal());
            if &lit != o {
                action.deletions.insert(triple(s, req.predicate.clone(), o.clone()));
                action.additions.insert(triple(s, req.predicate.clone(), lit));
            }
        }
        for u in index.values(s, &ns::eldv::unit()) {
            action.deletions.insert(triple(s, ns::eldv::unit(), u.clone()));
        }
        action
            .additions
            .insert(triple(s, ns::eldv::unit(), Term::string_literal(canonical.symbol)));
        action.additions.insert(etl_mark(s));
    }
    action.prune(g);
    action
}

/// Epoch-aligned slot nearest to `t`; ties go to the earlier slot.
pub fn align_to_grid(t: &DateTime<Utc>, grid_seconds: u64) -> DateTime<Utc> {
    let epoch = DateTime::<Utc>::UNIX_EPOCH;
    epoch + Duration::seconds(nearest_slot(t, &epoch, grid_seconds) * grid_seconds as i64)
}

pub fn align_timestamps(g: &Graph, grid_seconds: u64) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::AlignTimestamp, ns::eldv::etl());
    let index = Index::new(g);
    let (observed, original) = (ns::eldv::observed_at(), ns::eldv::original_observed_at());
    for (s, triples) in &index.by_subject {
        for t in triples.iter().filter(|t| t.predicate() == &observed) {
            let Some(at) = t.object().as_literal().and_then(|l| parse_datetime(l.lexical())) else {
                continue;
            };
            let aligned = align_to_grid(&at, grid_seconds);
            if aligned == at {
                continue;
            }
            action.deletions.insert((*t).clone());
            action.additions.insert(triple(
                s,
                observed.clone(),
                Term::typed_literal(format_timestamp(&aligned), ns::xsd::date_time()),
            ));
            if !index.has(s, &original) {
                action.additions.insert(triple(s, original.clone(), t.object().clone()));
            }
            action.additions.insert(etl_mark(s));
        }
    }
    action.prune(g);
    action
}

/// Marks subjects holding an outlying value; values stay as they are.
pub fn flag_outliers(g: &Graph, shapes: &[ShapeRequirement], units: &UnitTable) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::FlagOutlier, ns::eldv::etl());
    let flagged: BTreeSet<&Term> = numeric_observations(g, shapes, units)
        .into_iter()
        .filter(|o| o.outlier && !o.flagged)
        .map(|o| o.subject)
        .collect();
    for s in flagged {
        action.additions.insert(triple(
            s,
            ns::eldv::flagged_outlier(),
            Term::typed_literal("true", ns::xsd::boolean()),
        ));
        action.additions.insert(etl_mark(s));
        action.justification.push(format!("{s} flagged"));
    }
    action.prune(g);
    action
}

pub fn dedupe(g: &Graph) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::Dedupe, ns::eldv::etl());
    action.duplicates_removed = g.raw_statement_count() - g.len();
    if action.duplicates_removed > 0 {
        action
            .justification
            .push(format!("{} duplicate statement(s) collapsed", action.duplicates_removed));
    }
    action
}

/// Runs the selected steps in the fixed order, each on the output of the
/// previous one.
pub fn etl_steps(
    g: &Graph,
    shapes: &[ShapeRequirement],
    units: &UnitTable,
    grid_seconds: u64,
    steps: &[EtlStep],
) -> Vec<ImprovementAction> {
    let mut current = g.clone();
    let mut out = Vec::new();
    for step in EtlStep::ALL.into_iter().filter(|s| steps.contains(s)) {
        let action = match step {
            EtlStep::UnitNormalize => unit_normalize(&current, shapes, units),
            EtlStep::AlignTimestamp => align_timestamps(&current, grid_seconds),
            EtlStep::FlagOutlier => flag_outliers(&current, shapes, units),
            EtlStep::Dedupe => dedupe(&current),
        };
        apply_action(&mut current, &action);
        out.push(action);
    }
    out
}

/// All four steps.
pub fn etl_normalize(
    g: &Graph,
    shapes: &[ShapeRequirement],
    units: &UnitTable,
    grid_seconds: u64,
) -> Vec<ImprovementAction> {
    etl_steps(g, shapes, units, grid_seconds, &EtlStep::ALL)
}

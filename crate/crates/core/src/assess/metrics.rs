//! The twelve metric formulas. Each is a pure function over a graph
//! snapshot returning a [`Score`].

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::probe::{DereferenceProbe, ProbeOutcome};
use crate::numeric::{int, ratio, Rational};
use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::datatypes::{datatype_compatible, lexical_conforms, numeric_value, parse_datetime};
use crate::vocab::{ns, PredicateRequirement, ShapeRequirement, UnitTable};

/// A metric value with the counts behind it. `denominator == 0` marks a
/// vacuous pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Score {
    pub value: Rational,
    pub numerator: BigInt,
    pub denominator: BigInt,
}

impl Score {
    pub fn vacuous() -> Self {
        Score {
            value: int(1),
            numerator: BigInt::zero(),
            denominator: BigInt::zero(),
        }
    }

    /// `numerator / denominator`, unreduced counts kept.
    pub fn count(numerator: usize, denominator: usize) -> Self {
        if denominator == 0 {
            return Self::vacuous();
        }
        Score {
            value: ratio(numerator as u64, denominator as u64),
            numerator: BigInt::from(numerator),
            denominator: BigInt::from(denominator),
        }
    }

    /// A non-count value; the counts are its reduced fraction.
    pub fn exact(value: Rational) -> Self {
        Score {
            numerator: value.numer().clone(),
            denominator: value.denom().clone(),
            value,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.denominator.is_zero()
    }
}

// ---- indexing --------------------------------------------------------------

/// Triples grouped by subject, with the lookups the metrics share.
pub struct Index<'a> {
    pub by_subject: BTreeMap<&'a Term, Vec<&'a Triple>>,
}

impl<'a> Index<'a> {
    pub fn new(g: &'a Graph) -> Self {
        Index {
            by_subject: g.by_subject(),
        }
    }

    pub fn values(&self, s: &Term, p: &Iri) -> impl Iterator<Item = &'a Term> + '_ {
        let p = p.clone();
        self.by_subject
            .get(s)
            .into_iter()
            .flatten()
            .filter(move |t| t.predicate() == &p)
            .map(|t| t.object())
    }

    pub fn has(&self, s: &Term, p: &Iri) -> bool {
        self.values(s, p).next().is_some()
    }

    pub fn types(&self, s: &Term) -> impl Iterator<Item = &'a Iri> + '_ {
        self.values(s, &ns::rdf::type_()).filter_map(Term::as_iri)
    }

    /// Unit symbol annotated on `s`, if any.
    pub fn unit(&self, s: &Term) -> Option<&'a str> {
        self.values(s, &ns::eldv::unit())
            .find_map(Term::as_literal)
            .map(|l| l.lexical())
    }

    pub fn is_flagged(&self, s: &Term) -> bool {
        self.values(s, &ns::eldv::flagged_outlier())
            .filter_map(Term::as_literal)
            .any(|l| matches!(l.lexical(), "true" | "1"))
    }

    /// Every (instance, shape) pair, in subject order then shape order.
    pub fn shaped_instances<'s>(
        &self,
        shapes: &'s [ShapeRequirement],
    ) -> Vec<(&'a Term, &'s ShapeRequirement)> {
        let mut out = Vec::new();
        for s in self.by_subject.keys() {
            let types: BTreeSet<&Iri> = self.types(s).collect();
            for shape in shapes {
                if types.contains(&shape.class_iri) {
                    out.push((*s, shape));
                }
            }
        }
        out
    }
}

// ---- accessibility ---------------------------------------------------------

fn is_http(iri: &str) -> bool {
    iri.starts_with("http://") || iri.starts_with("https://")
}

/// Distinct http(s) IRIs in subject or object position, sorted.
pub fn probe_population(g: &Graph) -> Vec<&str> {
    let mut set = BTreeSet::new();
    for t in g {
        for term in [t.subject(), t.object()] {
            if let Some(iri) = term.as_iri() {
                if is_http(iri.as_str()) {
                    set.insert(iri.as_str());
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Probes a seeded sample of `min(sample_size, population)` IRIs drawn
/// without replacement. Results come back in population order.
pub fn probe_sample(
    g: &Graph,
    probe: &dyn DereferenceProbe,
    sample_size: usize,
    seed: u64,
) -> Vec<(String, ProbeOutcome)> {
    let population = probe_population(g);
    let picked: Vec<usize> = if population.len() <= sample_size {
        (0..population.len()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, population.len(), sample_size).into_vec();
        idx.sort_unstable();
        idx
    };
    picked
        .into_iter()
        .map(|i| (population[i].to_string(), probe.probe(population[i])))
        .collect()
}

pub fn availability_from(sample: &[(String, ProbeOutcome)]) -> Score {
    Score::count(sample.iter().filter(|(_, o)| o.is_success()).count(), sample.len())
}

pub fn metric_availability(g: &Graph, probe: &dyn DereferenceProbe, sample_size: usize, seed: u64) -> Score {
    availability_from(&probe_sample(g, probe, sample_size, seed))
}

/// Median latency against a budget. An even count takes the lower middle.
pub fn metric_performance(latencies: &[u64], l_max: &Rational) -> Score {
    if latencies.is_empty() {
        return Score::vacuous();
    }
    let mut sorted = latencies.to_vec();
    sorted.sort_unstable();
    let median = int(sorted[(sorted.len() - 1) / 2] as i64);
    if &median <= l_max {
        Score::exact(int(1))
    } else {
        Score::exact(l_max / median)
    }
}

pub fn metric_interlinking(g: &Graph, linking: &[Iri]) -> Score {
    let index = Index::new(g);
    let linked = index
        .by_subject
        .values()
        .filter(|ts| ts.iter().any(|t| linking.contains(t.predicate())))
        .count();
    Score::count(linked, index.by_subject.len())
}

// ---- intrinsic -------------------------------------------------------------

pub fn metric_completeness(g: &Graph, shapes: &[ShapeRequirement]) -> Score {
    let index = Index::new(g);
    let (mut present, mut slots) = (0, 0);
    for (s, shape) in index.shaped_instances(shapes) {
        for req in &shape.required {
            slots += 1;
            if index.has(s, &req.predicate) {
                present += 1;
            }
        }
    }
    Score::count(present, slots)
}

fn literal_conforms(object: &Term, req: &PredicateRequirement) -> bool {
    match (object.as_literal(), &req.datatype) {
        (Some(lit), Some(expected)) => {
            datatype_compatible(lit.datatype().as_str(), expected.as_str())
                && lexical_conforms(lit.lexical(), expected.as_str())
        }
        _ => true,
    }
}

/// Counts (checks, violations) over every shaped (instance, predicate)
/// occurrence.
pub fn consistency_counts(g: &Graph, shapes: &[ShapeRequirement], units: &UnitTable) -> (usize, usize) {
    let index = Index::new(g);
    let (mut checks, mut violations) = (0, 0);
    let mut tally = |ok: bool| {
        checks += 1;
        if !ok {
            violations += 1;
        }
    };
    for (s, shape) in index.shaped_instances(shapes) {
        for req in &shape.required {
            let objects: Vec<&Term> = index.values(s, &req.predicate).collect();
            for o in &objects {
                // the object kind matches what the shape expects
                tally(o.is_literal() == req.datatype.is_some());
                if o.is_literal() && req.datatype.is_some() {
                    tally(literal_conforms(o, req));
                    if let (Some(dim), Some(symbol)) = (req.unit_dimension, index.unit(s)) {
                        tally(units.lookup(symbol).is_some_and(|u| u.dimension == dim));
                    }
                }
            }
            if req.functional && !objects.is_empty() {
                tally(objects.len() <= 1);
            }
        }
    }
    (checks, violations)
}

pub fn metric_consistency(g: &Graph, shapes: &[ShapeRequirement], units: &UnitTable) -> Score {
    let (checks, violations) = consistency_counts(g, shapes, units);
    Score::count(checks - violations, checks)
}

/// One numeric value of a shaped predicate, in canonical units where the
/// subject's unit has the expected dimension.
#[derive(Debug, Clone)]
pub struct Observation<'a> {
    pub subject: &'a Term,
    pub class: &'a Iri,
    pub predicate: &'a Iri,
    pub value: Rational,
    pub outlier: bool,
    pub flagged: bool,
}

fn median(sorted: &[Rational]) -> Rational {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2].clone()
    } else {
        (&sorted[n / 2 - 1] + &sorted[n / 2]) / int(2)
    }
}

/// Q1 and Q3 as medians of the lower and upper halves; an odd-length
/// input leaves its median out of both halves.
pub fn quartiles(sorted: &[Rational]) -> (Rational, Rational) {
    let half = sorted.len() / 2;
    (median(&sorted[..half]), median(&sorted[sorted.len() - half..]))
}

pub const IQR_MIN_POPULATION: usize = 8;

pub fn numeric_observations<'a>(
    g: &'a Graph,
    shapes: &'a [ShapeRequirement],
    units: &UnitTable,
) -> Vec<Observation<'a>> {
    let index = Index::new(g);
    let mut obs = Vec::new();
    let mut groups: BTreeMap<(&Iri, &Iri), Vec<usize>> = BTreeMap::new();
    let mut ranges: BTreeMap<(&Iri, &Iri), &Option<(Rational, Rational)>> = BTreeMap::new();
    for (s, shape) in index.shaped_instances(shapes) {
        for req in shape.required.iter().filter(|r| r.is_numeric()) {
            let unit = index
                .unit(s)
                .and_then(|sym| units.lookup(sym))
                .filter(|u| Some(u.dimension) == req.unit_dimension);
            for o in index.values(s, &req.predicate) {
                let Some(raw) = o.as_literal().and_then(numeric_value) else {
                    continue;
                };
                let value = match unit {
                    Some(u) => raw * &u.factor + &u.offset,
                    None => raw,
                };
                groups.entry((&shape.class_iri, &req.predicate)).or_default().push(obs.len());
                ranges.insert((&shape.class_iri, &req.predicate), &req.range);
                obs.push(Observation {
                    subject: s,
                    class: &shape.class_iri,
                    predicate: &req.predicate,
                    value,
                    outlier: false,
                    flagged: index.is_flagged(s),
                });
            }
        }
    }
    for (key, members) in groups {
        let (lo, hi) = match ranges[&key] {
            Some((lo, hi)) => (lo.clone(), hi.clone()),
            None if members.len() >= IQR_MIN_POPULATION => {
                let mut values: Vec<Rational> = members.iter().map(|&i| obs[i].value.clone()).collect();
                values.sort();
                let (q1, q3) = quartiles(&values);
                let fence = (&q3 - &q1) * ratio(3, 2);
                (&q1 - &fence, &q3 + &fence)
            }
            None => continue,
        };
        for i in members {
            obs[i].outlier = obs[i].value < lo || obs[i].value > hi;
        }
    }
    obs
}

/// Outliers already carrying an `eldv:flaggedOutlier` mark count as
/// handled.
pub fn metric_semantic_accuracy(g: &Graph, shapes: &[ShapeRequirement], units: &UnitTable) -> Score {
    let obs = numeric_observations(g, shapes, units);
    let bad = obs.iter().filter(|o| o.outlier && !o.flagged).count();
    Score::count(obs.len() - bad, obs.len())
}

// ---- RDF level -------------------------------------------------------------

/// Distinct predicates and `rdf:type` classes used in `g`.
pub fn used_terms(g: &Graph) -> BTreeSet<&str> {
    let rdf_type = ns::rdf::type_();
    let mut set = BTreeSet::new();
    for t in g {
        set.insert(t.predicate().as_str());
        if t.predicate() == &rdf_type {
            if let Some(class) = t.object().as_iri() {
                set.insert(class.as_str());
            }
        }
    }
    set
}

pub fn metric_interpretability(g: &Graph, declared_vocab: &Graph) -> Score {
    let mut declared: BTreeSet<&str> = BTreeSet::new();
    for t in declared_vocab {
        for term in [t.subject(), t.object()] {
            if let Some(iri) = term.as_iri() {
                declared.insert(iri.as_str());
            }
        }
    }
    let terms = used_terms(g);
    let ok = terms
        .iter()
        .filter(|t| declared.contains(*t) || ns::CORE_NAMESPACES.iter().any(|n| t.starts_with(n)))
        .count();
    Score::count(ok, terms.len())
}

pub fn metric_interoperability(g: &Graph, standard_namespaces: &[String]) -> Score {
    let terms = used_terms(g);
    let ok = terms
        .iter()
        .filter(|t| standard_namespaces.iter().any(|n| t.starts_with(n.as_str())))
        .count();
    Score::count(ok, terms.len())
}

pub fn metric_compactness(g: &Graph) -> Score {
    if g.is_empty() {
        return Score::vacuous();
    }
    let dedup = ratio(g.len() as u64, g.raw_statement_count() as u64);
    let subjects = g.subjects();
    let blank = subjects.iter().filter(|s| s.is_blank()).count();
    let blank_complement = int(1) - ratio(blank as u64, subjects.len() as u64);
    Score::exact((dedup + blank_complement) / int(2))
}

// ---- task dependent --------------------------------------------------------

pub fn metric_provenance(g: &Graph) -> Score {
    let index = Index::new(g);
    let (source, generated) = (ns::eldv::source(), ns::eldv::generated_at());
    let typed: Vec<&&Term> = index
        .by_subject
        .keys()
        .filter(|s| index.types(s).next().is_some())
        .collect();
    let stamped = typed
        .iter()
        .filter(|s| index.has(s, &source) && index.has(s, &generated))
        .count();
    Score::count(stamped, typed.len())
}

/// `max(0, 1 - age / max_age)`; future timestamps count as age zero.
pub fn freshness_of(observed: &DateTime<Utc>, now: &DateTime<Utc>, max_age_seconds: u64) -> Rational {
    let age_ms = (*now - *observed).num_milliseconds().max(0);
    let f = int(1) - Rational::new(BigInt::from(age_ms), BigInt::from(max_age_seconds) * 1000);
    if f.is_negative() {
        Rational::zero()
    } else {
        f
    }
}

pub fn metric_freshness(g: &Graph, now: &DateTime<Utc>, max_age_seconds: u64) -> Score {
    let index = Index::new(g);
    let observed_at = ns::eldv::observed_at();
    let mut total = Rational::zero();
    let mut n = 0u64;
    for s in index.by_subject.keys() {
        let stamps: Vec<&Term> = index.values(s, &observed_at).collect();
        if stamps.is_empty() {
            continue;
        }
        n += 1;
        // the most recent parseable stamp; malformed ones score zero
        let latest = stamps
            .iter()
            .filter_map(|t| t.as_literal())
            .filter_map(|l| parse_datetime(l.lexical()))
            .max();
        if let Some(t) = latest {
            total += freshness_of(&t, now, max_age_seconds);
        }
    }
    if n == 0 {
        return Score::vacuous();
    }
    Score::exact(total / int(n as i64))
}

/// Weighted mean over the metrics that have both a weight and a value.
pub fn metric_usability(values: &[(&str, &Rational)], weights: &BTreeMap<String, Rational>) -> Score {
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for (id, v) in values {
        if let Some(w) = weights.get(*id) {
            num += w * *v;
            den += w;
        }
    }
    if den.is_zero() {
        return Score::vacuous();
    }
    Score::exact(num / den)
}


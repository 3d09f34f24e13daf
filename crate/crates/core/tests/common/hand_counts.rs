//! Small graphs whose metric values were counted by hand.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use ldq::assess::metrics::*;
use ldq::assess::FixtureProbe;
use ldq::numeric::{int, Rational};
use ldq::vocab::{ns, Dimension, UnitTable};

use super::{data_req, nt, object_req, r, shape};

pub struct HandCount {
    pub name: &'static str,
    pub actual: Score,
    pub expected: Rational,
    /// Expected zero denominator.
    pub vacuous: bool,
}

impl HandCount {
    pub fn holds(&self) -> bool {
        self.actual.value == self.expected && self.actual.is_vacuous() == self.vacuous
    }
}

fn case(name: &'static str, actual: Score, expected: Rational) -> HandCount {
    HandCount {
        name,
        actual,
        expected,
        vacuous: false,
    }
}

fn vacuous(name: &'static str, actual: Score) -> HandCount {
    HandCount {
        name,
        actual,
        expected: int(1),
        vacuous: true,
    }
}

const DEC: &str = "http://www.w3.org/2001/XMLSchema#decimal";
const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

fn at(s: &str) -> DateTime<Utc> {
    s.parse().unwrap()
}

pub fn all() -> Vec<HandCount> {
    let units = UnitTable::builtin();
    let mut out = Vec::new();

    // availability: a, c succeed; b, d fail; urn: IRIs stay out of the population
    let probe = FixtureProbe::from_pairs([
        ("http://ex.org/a", 200, 10),
        ("http://ex.org/b", 404, 10),
        ("http://ex.org/c", 200, 10),
        ("http://ex.org/d", 503, 10),
    ]);
    let g = nt("<http://ex.org/a> <urn:p> <http://ex.org/b> .\n\
                <http://ex.org/c> <urn:p> <http://ex.org/d> .\n\
                <urn:x> <urn:p> <urn:y> .\n");
    out.push(case("availability 2 of 4", metric_availability(&g, &probe, 4, 7), r(1, 2)));
    let only_urn = nt("<urn:x> <urn:p> <urn:y> .\n");
    out.push(vacuous("availability urn only", metric_availability(&only_urn, &probe, 4, 7)));
    let all_404 = nt("<http://ex.org/b> <urn:p> <http://ex.org/zz> .\n");
    out.push(case("availability all 404", metric_availability(&all_404, &probe, 10, 7), int(0)));

    // performance
    let lmax = int(1000);
    out.push(case("performance under budget", metric_performance(&[500], &lmax), int(1)));
    out.push(case("performance median 2000", metric_performance(&[2000], &lmax), r(1, 2)));
    out.push(case(
        "performance even count lower middle",
        metric_performance(&[4000, 1000, 3000, 2000], &lmax),
        r(1, 2),
    ));
    out.push(vacuous("performance no probes", metric_performance(&[], &lmax)));

    // interlinking: s1..s3 linked, s4 not
    let g = nt("<urn:s1> <http://www.w3.org/2002/07/owl#sameAs> <urn:o> .\n\
                <urn:s2> <http://www.w3.org/2000/01/rdf-schema#seeAlso> <urn:o> .\n\
                <urn:s3> <http://www.w3.org/2002/07/owl#sameAs> <urn:o2> .\n\
                <urn:s4> <urn:p> <urn:o> .\n");
    let linking = [ns::owl::same_as(), ns::rdfs::see_also()];
    out.push(case("interlinking 3 of 4", metric_interlinking(&g, &linking), r(3, 4)));
    out.push(case("interlinking none", metric_interlinking(&g, &[super::iri("urn:none")]), int(0)));

    // completeness: 2 instances x 2 required predicates, one missing
    let shapes = [shape("urn:C", vec![object_req("urn:p"), object_req("urn:q")])];
    let g = nt(&format!(
        "<urn:i1> <{TYPE}> <urn:C> .\n<urn:i1> <urn:p> <urn:v> .\n<urn:i1> <urn:q> <urn:v> .\n\
         <urn:i2> <{TYPE}> <urn:C> .\n<urn:i2> <urn:p> <urn:v> .\n"
    ));
    out.push(case("completeness 3 of 4", metric_completeness(&g, &shapes), r(3, 4)));
    out.push(vacuous(
        "completeness no shaped instance",
        metric_completeness(&nt("<urn:a> <urn:p> <urn:b> .\n"), &shapes),
    ));

    // consistency: s1 3 checks, s2 4 checks with 2 violations (lexical, unit), s3 3 checks
    let shapes = [shape("urn:C", vec![data_req("urn:e", DEC, Some(Dimension::Energy))])];
    let g = nt(&format!(
        "<urn:s1> <{TYPE}> <urn:C> .\n<urn:s1> <urn:e> \"1.5\"^^<{DEC}> .\n\
         <urn:s2> <{TYPE}> <urn:C> .\n<urn:s2> <urn:e> \"abc\"^^<{DEC}> .\n<urn:s2> <urn:eldv#unit> \"K\" .\n\
         <urn:s3> <{TYPE}> <urn:C> .\n<urn:s3> <urn:e> \"2\"^^<{DEC}> .\n"
    ));
    out.push(case("consistency 8 of 10", metric_consistency(&g, &shapes, &units), r(8, 10)));
    let temp = [shape("urn:T", vec![data_req("urn:temp", DEC, Some(Dimension::Temperature))])];
    let g = nt(&format!(
        "<urn:t1> <{TYPE}> <urn:T> .\n<urn:t1> <urn:temp> \"21\"^^<{DEC}> .\n<urn:t1> <urn:eldv#unit> \"kWh\" .\n"
    ));
    // kind, lexical, unit (violated), functional
    out.push(case("consistency temperature in kWh", metric_consistency(&g, &temp, &units), r(3, 4)));

    // semantic accuracy: 20 readings, one of them 10x
    let shapes = [shape("urn:Consumption", vec![data_req("urn:e", DEC, None)])];
    let mut text = String::new();
    for i in 0..20 {
        let v = if i == 7 { Rational::from_integer(20.into()) } else { int(2) + r(i, 100) };
        let v = ldq::numeric::format_decimal(&v, 6);
        text += &format!("<urn:m{i}> <{TYPE}> <urn:Consumption> .\n<urn:m{i}> <urn:e> \"{v}\"^^<{DEC}> .\n");
    }
    out.push(case(
        "semanticAccuracy one 10x in 20",
        metric_semantic_accuracy(&nt(&text), &shapes, &units),
        r(19, 20),
    ));
    let g = nt(&format!(
        "<urn:a> <{TYPE}> <urn:Consumption> .\n<urn:a> <urn:e> \"1\"^^<{DEC}> .\n\
         <urn:b> <{TYPE}> <urn:Consumption> .\n<urn:b> <urn:e> \"2\"^^<{DEC}> .\n\
         <urn:c> <{TYPE}> <urn:Consumption> .\n<urn:c> <urn:e> \"500\"^^<{DEC}> .\n"
    ));
    out.push(case(
        "semanticAccuracy population of 3",
        metric_semantic_accuracy(&g, &shapes, &units),
        int(1),
    ));

    // interpretability: p5 undeclared
    let declared = nt("<urn:x:p1> <urn:k> <urn:Property> .\n<urn:x:p2> <urn:k> <urn:Property> .\n\
                       <urn:x:p3> <urn:k> <urn:Property> .\n<urn:x:p4> <urn:k> <urn:Property> .\n");
    let g = nt("<urn:s> <urn:x:p1> <urn:o> .\n<urn:s> <urn:x:p2> <urn:o> .\n<urn:s> <urn:x:p3> <urn:o> .\n\
                <urn:s> <urn:x:p4> <urn:o> .\n<urn:s> <urn:x:p5> <urn:o> .\n");
    out.push(case("interpretability 4 of 5", metric_interpretability(&g, &declared), r(4, 5)));
    out.push(vacuous(
        "interpretability empty graph",
        metric_interpretability(&ldq::rdf::Graph::new(), &declared),
    ));

    // interoperability: std#a, std#b, std#C standard; rdf:type, other#c, other#d not
    let g = nt(&format!(
        "<urn:s> <urn:std#a> <urn:o> .\n<urn:s> <urn:std#b> <urn:o> .\n<urn:s> <{TYPE}> <urn:std#C> .\n\
         <urn:s> <urn:other#c> <urn:o> .\n<urn:s> <urn:other#d> <urn:o> .\n"
    ));
    out.push(case(
        "interoperability 3 of 6",
        metric_interoperability(&g, &["urn:std#".to_string()]),
        r(1, 2),
    ));
    out.push(case(
        "interoperability no namespace matches",
        metric_interoperability(&g, &["urn:nothing#".to_string()]),
        int(0),
    ));

    // compactness: 8 distinct triples, 10 statements
    let mut text = String::new();
    for i in 0..8 {
        text += &format!("<urn:s{i}> <urn:p> <urn:o> .\n");
    }
    text += "<urn:s0> <urn:p> <urn:o> .\n<urn:s1> <urn:p> <urn:o> .\n";
    out.push(case("compactness 8 of 10 raw", metric_compactness(&nt(&text)), r(9, 10)));
    let blanks = nt("_:a <urn:p> <urn:o> .\n_:b <urn:p> <urn:o> .\n");
    out.push(case("compactness all blank", metric_compactness(&blanks), r(1, 2)));
    out.push(vacuous("compactness empty", metric_compactness(&ldq::rdf::Graph::new())));

    // provenance: s4 lacks eldv:source
    let mut text = String::new();
    for i in 1..=4 {
        text += &format!("<urn:s{i}> <{TYPE}> <urn:C> .\n<urn:s{i}> <urn:eldv#generatedAt> \"x\" .\n");
        if i != 4 {
            text += &format!("<urn:s{i}> <urn:eldv#source> <urn:src> .\n");
        }
    }
    out.push(case("provenance 3 of 4", metric_provenance(&nt(&text)), r(3, 4)));
    out.push(vacuous(
        "provenance untyped",
        metric_provenance(&nt("<urn:s> <urn:p> <urn:o> .\n")),
    ));

    // freshness, maxAge one hour
    let now = at("2024-05-01T12:00:00Z");
    let stamp = |s: &str, when: DateTime<Utc>| {
        format!(
            "<{s}> <urn:eldv#observedAt> \"{}\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .\n",
            ldq::ingest::format_timestamp(&when)
        )
    };
    let g = nt(&(stamp("urn:a", now) + &stamp("urn:b", now - Duration::seconds(1800))));
    out.push(case("freshness ages 0 and maxAge/2", metric_freshness(&g, &now, 3600), r(3, 4)));
    let g = nt(&stamp("urn:a", now - Duration::seconds(3600)));
    out.push(case("freshness aged maxAge", metric_freshness(&g, &now, 3600), int(0)));
    let g = nt(&(stamp("urn:a", now) + "<urn:b> <urn:eldv#observedAt> \"yesterday\" .\n"));
    out.push(case("freshness malformed stamp", metric_freshness(&g, &now, 3600), r(1, 2)));
    out.push(vacuous(
        "freshness no stamps",
        metric_freshness(&nt("<urn:s> <urn:p> <urn:o> .\n"), &now, 3600),
    ));

    // usability
    let weights: BTreeMap<String, Rational> = [("completeness".to_string(), int(2)), ("freshness".to_string(), int(1))].into();
    let (c, f) = (r(9, 10), r(6, 10));
    out.push(case(
        "usability weighted mean",
        metric_usability(&[("completeness", &c), ("freshness", &f)], &weights),
        r(8, 10),
    ));
    out.push(vacuous("usability no weights", metric_usability(&[("completeness", &c)], &BTreeMap::new())));

    out
}

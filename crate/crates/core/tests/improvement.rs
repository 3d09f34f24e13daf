mod common;

use common::{data_req, iri, nt, object_req, r, shape};
use ldq::assess::metrics::{metric_compactness, metric_semantic_accuracy};
use ldq::improve::apriori::subject_items;
use ldq::improve::etl::{align_timestamps, dedupe, flag_outliers, unit_normalize};
use ldq::improve::{
    apply_action, clean_transactions, impute_missing, interlink_clusters, levenshtein, mine_apriori, similarity,
    train_svr, Item, Orientation, SvrError, Transaction,
};
use ldq::numeric::{int, ratio};
use ldq::rdf::Term;
use ldq::vocab::{convert_unit, ns, Dimension, SvrHyper, UnitTable};
use proptest::prelude::*;

const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

fn tx(sets: &[&str]) -> Vec<Transaction> {
    sets.iter()
        .enumerate()
        .map(|(k, s)| Transaction {
            key: format!("t{k}"),
            items: s
                .chars()
                .map(|c| Item::new(iri("urn:p"), Term::iri(format!("urn:{c}")).unwrap()))
                .collect(),
        })
        .collect()
}

fn rule_texts(rules: &[ldq::improve::AssociationRule]) -> Vec<(String, String, String)> {
    rules
        .iter()
        .map(|r| (r.text(), r.support.to_string(), r.confidence.to_string()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn apriori_matches_brute_force(seed in any::<u64>()) {
        common::criteria::apriori_case(seed).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn apriori_worked_example() {
    let rules = mine_apriori(&tx(&["AB", "AB", "AB", "AC"]), &r(1, 2), &r(7, 10), Orientation::ObjectImputation);
    let texts = rule_texts(&rules);
    assert!(texts.contains(&("{<urn:p> <urn:A>} => <urn:p> <urn:B>".into(), "3/4".into(), "3/4".into())));
    assert!(texts.contains(&("{<urn:p> <urn:B>} => <urn:p> <urn:A>".into(), "3/4".into(), "1".into())));
    assert_eq!(rules.len(), 2);
    // highest confidence first
    assert_eq!(rules[0].confidence, int(1));
}

#[test]
fn apriori_single_transaction() {
    let rules = mine_apriori(&tx(&["AB"]), &int(1), &int(1), Orientation::ObjectImputation);
    assert_eq!(rules.len(), 2);
}

#[test]
fn numeric_objects_are_not_items() {
    let g = nt(&format!(
        "<urn:s> <urn:a> \"1\"^^<{d}> .\n<urn:s> <urn:b> \"2.5\"^^<{d2}> .\n<urn:s> <urn:c> <urn:x> .\n<urn:s> <urn:d> <urn:y> .\n",
        d = ns::xsd::INTEGER,
        d2 = ns::xsd::DECIMAL
    ));
    assert_eq!(subject_items(&g, &Term::iri("urn:s").unwrap()).len(), 2);
}

#[test]
fn rule_fills_the_one_missing_room() {
    let mut text = String::new();
    for i in 0..10 {
        text += &format!("<urn:hvac{i}> <{TYPE}> <urn:HVAC> .\n");
        if i != 4 {
            text += &format!("<urn:hvac{i}> <urn:locatedIn> <urn:Room1> .\n");
        }
    }
    let g = nt(&text);
    let shapes = [shape("urn:HVAC", vec![object_req("urn:locatedIn")])];
    let clean = clean_transactions(&g, &shapes, Orientation::ObjectImputation);
    assert_eq!(clean.len(), 9);
    let rules = mine_apriori(&clean, &r(1, 2), &int(1), Orientation::ObjectImputation);
    let action = impute_missing(&g, &shapes, &rules);
    let values: Vec<_> = action
        .additions
        .iter()
        .filter(|t| t.predicate().as_str() == "urn:locatedIn")
        .collect();
    assert_eq!(values.len(), 1);
    assert_eq!(values[0].subject(), &Term::iri("urn:hvac4").unwrap());
    assert_eq!(values[0].object(), &Term::iri("urn:Room1").unwrap());
}

#[test]
fn distant_labels_stay_unlinked() {
    // only the `a` survives: 5 deletions and 3 substitutions
    assert_eq!(levenshtein("heater-01", "lamp"), 8);
    assert_eq!(similarity("heater-01", "lamp"), r(1, 9));
    let g = nt(&format!(
        "<urn:a> <{l}> \"heater-01\" .\n<urn:b> <{l}> \"lamp\" .\n",
        l = ns::rdfs::LABEL
    ));
    assert!(interlink_clusters(&g, &ns::rdfs::label(), &r(85, 100)).is_empty());
}

#[test]
fn label_variants_link_to_the_smallest_iri() {
    let g = nt(&format!(
        "<urn:a2> <{l}> \"Heat Pump\" .\n<urn:a1> <{l}> \"heat pump.\" .\n<urn:a3> <{l}> \"Heat Pumps\" .\n<urn:z> <{l}> \"fridge\" .\n",
        l = ns::rdfs::LABEL
    ));
    let action = interlink_clusters(&g, &ns::rdfs::label(), &r(85, 100));
    let links: Vec<_> = action
        .additions
        .iter()
        .filter(|t| t.predicate().as_str() == ns::owl::SAME_AS)
        .map(|t| (t.subject().clone(), t.object().clone()))
        .collect();
    let a1 = Term::iri("urn:a1").unwrap();
    assert_eq!(links, vec![(Term::iri("urn:a2").unwrap(), a1.clone()), (Term::iri("urn:a3").unwrap(), a1)]);
}

#[test]
fn hour_13_filled_within_five_percent() {
    let v = common::criteria::fill_hour_13().unwrap();
    let truth = 8.5;
    assert!((ldq::numeric::to_f64(&v) - truth).abs() / truth < 0.05, "{v}");
}

#[test]
fn svr_tracks_least_squares() {
    assert!(common::criteria::svr_vs_ols().unwrap() < 0.02);
}

#[test]
fn svr_needs_five_points() {
    let t0 = common::criteria::t0();
    let pts: Vec<_> = (0..4).map(|h| (t0 + chrono::Duration::hours(h), h as f64)).collect();
    assert_eq!(train_svr(&pts, &SvrHyper::default()), Err(SvrError::TooFewPoints(4)));
    let same = vec![(t0, 1.0); 6];
    assert_eq!(train_svr(&same, &SvrHyper::default()), Err(SvrError::DegenerateTimeRange));
}

#[test]
fn svr_is_deterministic() {
    let t0 = common::criteria::t0();
    let pts: Vec<_> = (0..12)
        .map(|h| (t0 + chrono::Duration::hours(h), (h as f64 * 0.7).sin()))
        .collect();
    assert_eq!(train_svr(&pts, &SvrHyper::default()), train_svr(&pts, &SvrHyper::default()));
}

#[test]
fn unit_conversions_are_exact() {
    let units = UnitTable::builtin();
    let kwh = units.lookup("kWh").unwrap();
    assert_eq!(convert_unit(&r(5, 2), kwh, Dimension::Energy).unwrap(), int(9_000_000));
    assert_eq!(convert_unit(&int(1), kwh, Dimension::Energy).unwrap(), int(3_600_000));
    assert_eq!(
        convert_unit(&int(0), units.lookup("°C").unwrap(), Dimension::Temperature).unwrap(),
        ratio(27315, 100)
    );
    assert!(convert_unit(&int(1), kwh, Dimension::Temperature).is_err());
}

#[test]
fn kwh_literal_rewritten_in_joules() {
    let g = nt(&format!(
        "<urn:m> <{TYPE}> <urn:C> .\n<urn:m> <urn:e> \"3.5\"^^<{d}> .\n<urn:m> <urn:eldv#unit> \"kWh\" .\n",
        d = ns::xsd::DECIMAL
    ));
    let shapes = [shape("urn:C", vec![data_req("urn:e", ns::xsd::DECIMAL, Some(Dimension::Energy))])];
    let mut out = g.clone();
    apply_action(&mut out, &unit_normalize(&g, &shapes, &UnitTable::builtin()));
    let text = String::from_utf8(ldq::rdf::serialize_ntriples(&out)).unwrap();
    assert!(text.contains("<urn:m> <urn:e> \"12600000\"^^"), "{text}");
    assert!(text.contains("<urn:m> <urn:eldv#unit> \"J\" ."), "{text}");
    assert!(!text.contains("kWh"));
}

#[test]
fn stale_stamp_snaps_to_grid() {
    let g = nt(&format!(
        "<urn:m> <urn:eldv#observedAt> \"2024-05-01T03:07:00Z\"^^<{dt}> .\n",
        dt = ns::xsd::DATE_TIME
    ));
    let mut out = g.clone();
    apply_action(&mut out, &align_timestamps(&g, 3600));
    let text = String::from_utf8(ldq::rdf::serialize_ntriples(&out)).unwrap();
    assert!(text.contains("observedAt> \"2024-05-01T03:00:00Z\""), "{text}");
    assert!(text.contains("originalObservedAt> \"2024-05-01T03:07:00Z\""), "{text}");
}

#[test]
fn dedupe_restores_compactness() {
    let mut g = nt("<urn:a> <urn:p> <urn:o> .\n<urn:a> <urn:p> <urn:o> .\n<urn:b> <urn:p> <urn:o> .\n");
    assert_eq!(metric_compactness(&g).value, r(5, 6));
    let action = dedupe(&g);
    assert_eq!(action.duplicates_removed, 1);
    apply_action(&mut g, &action);
    assert_eq!(metric_compactness(&g).value, int(1));
}

#[test]
fn flagged_outliers_count_as_handled() {
    let shapes = [shape("urn:C", vec![data_req("urn:e", ns::xsd::DECIMAL, None)])];
    let mut text = String::new();
    for i in 0..20 {
        let v = if i == 3 { "25".to_string() } else { format!("2.{i:02}") };
        text += &format!("<urn:m{i}> <{TYPE}> <urn:C> .\n<urn:m{i}> <urn:e> \"{v}\"^^<{}> .\n", ns::xsd::DECIMAL);
    }
    let mut g = nt(&text);
    let units = UnitTable::builtin();
    assert_eq!(metric_semantic_accuracy(&g, &shapes, &units).value, r(19, 20));
    let action = flag_outliers(&g, &shapes, &units);
    let flags = action
        .additions
        .iter()
        .filter(|t| t.predicate().as_str() == ns::eldv::FLAGGED_OUTLIER)
        .count();
    assert_eq!(flags, 1);
    apply_action(&mut g, &action);
    assert_eq!(metric_semantic_accuracy(&g, &shapes, &units).value, int(1));
}

#[test]
fn etl_second_pass_is_a_no_op() {
    let fx = common::load("defects");
    let once = common::criteria::normalized(&fx.graph, &fx);
    let twice = common::criteria::normalized(&once, &fx);
    assert_eq!(ldq::rdf::serialize_ntriples(&once), ldq::rdf::serialize_ntriples(&twice));
}

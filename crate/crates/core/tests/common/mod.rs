#![allow(dead_code)]

pub mod criteria;
pub mod gen;
pub mod hand_counts;
pub mod oracles;
pub mod parity;

use std::path::PathBuf;

use ldq::facade::fixture::FixtureManifest;
use ldq::ingest::{load_mapping, mapping_vocab};
use ldq::numeric::Rational;
use ldq::rdf::{parse_ntriples, Graph, Iri, Term, Triple};
use ldq::vocab::{load_policy, Dimension, PredicateRequirement, QualityPolicy, ShapeRequirement};

pub const E: &str = "https://w3id.org/ldq/energy#";

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str, file: &str) -> Vec<u8> {
    let path = fixture_dir(name).join(file);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// A shipped fixture directory, loaded.
pub struct Loaded {
    pub graph: Graph,
    pub policy: QualityPolicy,
    pub vocab: Graph,
    pub manifest: FixtureManifest,
}

pub fn load(name: &str) -> Loaded {
    Loaded {
        graph: parse_ntriples(&read_fixture(name, "dataset.nt")).unwrap(),
        policy: load_policy(&read_fixture(name, "assessment.json"), &read_fixture(name, "rules.json")).unwrap(),
        vocab: mapping_vocab(&load_mapping(&read_fixture(name, "mapping.json")).unwrap()),
        manifest: serde_json::from_slice(&read_fixture(name, "manifest.json")).unwrap(),
    }
}

pub fn nt(text: &str) -> Graph {
    parse_ntriples(text.as_bytes()).unwrap()
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn t(s: &str, p: &str, o: Term) -> Triple {
    Triple::new(Term::iri(s).unwrap(), iri(p), o).unwrap()
}

pub fn r(n: u64, d: u64) -> Rational {
    ldq::numeric::ratio(n, d)
}

pub fn data_req(pred: &str, datatype: &str, dim: Option<Dimension>) -> PredicateRequirement {
    PredicateRequirement {
        predicate: iri(pred),
        datatype: Some(iri(datatype)),
        unit_dimension: dim,
        functional: true,
        range: None,
    }
}

pub fn object_req(pred: &str) -> PredicateRequirement {
    PredicateRequirement {
        predicate: iri(pred),
        datatype: None,
        unit_dimension: None,
        functional: true,
        range: None,
    }
}

pub fn shape(class: &str, required: Vec<PredicateRequirement>) -> ShapeRequirement {
    ShapeRequirement {
        class_iri: iri(class),
        required,
    }
}

/// The clean fixture with every appliance label and dweller role removed.
/// Nothing in the remaining data predicts either value.
pub fn unrecoverable_graph() -> Graph {
    let mut g = load("clean").graph;
    let doomed: Vec<Triple> = g
        .iter()
        .filter(|t| {
            t.predicate().as_str() == ldq::vocab::ns::rdfs::LABEL
                || t.predicate().as_str() == format!("{E}householdRole")
        })
        .cloned()
        .collect();
    assert_eq!(doomed.len(), 15);
    for t in &doomed {
        g.remove(t);
    }
    g
}

//! Seeded random graphs with awkward lexical forms.

use ldq::rdf::{Graph, Iri, Literal, Term, Triple};
use rand::Rng;

const CHARS: &[char] = &[
    'a', 'b', 'z', 'Q', '0', '9', ' ', '"', '\\', '\n', '\r', '\t', '\'', '<', '>', '#', '.', ';', ',', 'é', '€',
    '😀', '\u{1}', '\u{7f}', '^', '@', '_', ':',
];

const DATATYPES: &[&str] = &[
    "http://www.w3.org/2001/XMLSchema#string",
    "http://www.w3.org/2001/XMLSchema#decimal",
    "http://www.w3.org/2001/XMLSchema#integer",
    "http://www.w3.org/2001/XMLSchema#dateTime",
    "urn:custom:type",
];

fn text(rng: &mut impl Rng) -> String {
    let n = rng.random_range(0..12);
    (0..n).map(|_| CHARS[rng.random_range(0..CHARS.len())]).collect()
}

fn iri(rng: &mut impl Rng) -> Iri {
    let n: u32 = rng.random_range(0..60);
    let s = match rng.random_range(0..4) {
        0 => format!("urn:x:{n}"),
        1 => format!("http://ex.org/r/{n}"),
        2 => format!("https://ex.org/a%20b/é{n}#frag"),
        _ => format!("urn:eldv#{n}"),
    };
    Iri::new(s).unwrap()
}

fn blank(rng: &mut impl Rng) -> Term {
    let n: u32 = rng.random_range(0..40);
    let label = if rng.random_bool(0.5) { format!("b{n}") } else { format!("n.{n}-x_y") };
    Term::blank(label).unwrap()
}

fn object(rng: &mut impl Rng) -> Term {
    match rng.random_range(0..6) {
        0 => Term::Iri(iri(rng)),
        1 => blank(rng),
        2 => Term::string_literal(text(rng)),
        3 => Term::Literal(Literal::lang_string(text(rng), ["en", "de-CH", "x-a1"][rng.random_range(0..3)]).unwrap()),
        _ => Term::typed_literal(text(rng), Iri::new(DATATYPES[rng.random_range(0..DATATYPES.len())]).unwrap()),
    }
}

pub fn random_triple(rng: &mut impl Rng) -> Triple {
    let subject = if rng.random_bool(0.8) { Term::Iri(iri(rng)) } else { blank(rng) };
    Triple::new(subject, iri(rng), object(rng)).unwrap()
}

/// Up to `max` distinct triples, raw count equal to the triple count.
pub fn random_graph(rng: &mut impl Rng, max: usize) -> Graph {
    let n = rng.random_range(0..=max);
    let mut g = Graph::new();
    for _ in 0..n {
        let t = random_triple(rng);
        if !g.contains(&t) {
            g.insert(t);
        }
    }
    g
}

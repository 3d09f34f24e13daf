//! Parse Turtle, write canonical N-Triples, and read it back.

use ldq::rdf::{parse_ntriples, parse_turtle_subset, serialize_ntriples, serialize_turtle, Term, TriplePattern};
use ldq::vocab::ns::TURTLE_PREFIXES;

const DOC: &str = r#"@prefix e: <https://w3id.org/ldq/energy#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
e:meter1 a e:Consumption ;
    e:energy "2.5"^^xsd:decimal ;
    <http://www.w3.org/2000/01/rdf-schema#label> "Zähler \"eins\""@de .
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_turtle_subset(DOC.as_bytes())?;
    let nt = serialize_ntriples(&g);
    print!("{}", String::from_utf8_lossy(&nt));
    assert_eq!(parse_ntriples(&nt)?, g);

    let meter = Term::iri("https://w3id.org/ldq/energy#meter1")?;
    println!("{} statements about meter1", g.match_pattern(&TriplePattern::any().subject(meter)).len());
    println!("{}", String::from_utf8_lossy(&serialize_turtle(&g, TURTLE_PREFIXES)));
    Ok(())
}

//! Mine association rules over complete instances and fill a missing link.

use ldq::improve::{apply_action, clean_transactions, impute_missing, mine_apriori, Orientation};
use ldq::numeric::ratio;
use ldq::rdf::{parse_ntriples, serialize_ntriples, Iri};
use ldq::vocab::{PredicateRequirement, ShapeRequirement};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut text = String::new();
    for i in 0..8 {
        text += &format!("<urn:hvac{i}> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <urn:HVAC> .\n");
        text += &format!("<urn:hvac{i}> <urn:vendor> <urn:Acme> .\n");
        if i != 5 {
            text += &format!("<urn:hvac{i}> <urn:locatedIn> <urn:Plantroom> .\n");
        }
    }
    let mut g = parse_ntriples(text.as_bytes())?;

    let located = PredicateRequirement {
        predicate: Iri::new("urn:locatedIn")?,
        datatype: None,
        unit_dimension: None,
        functional: true,
        range: None,
    };
    let shapes = [ShapeRequirement {
        class_iri: Iri::new("urn:HVAC")?,
        required: vec![located],
    }];

    let transactions = clean_transactions(&g, &shapes, Orientation::ObjectImputation);
    let rules = mine_apriori(&transactions, &ratio(1, 2), &ratio(9, 10), Orientation::ObjectImputation);
    for r in &rules {
        println!("{}  support {} confidence {}", r.text(), r.support, r.confidence);
    }
    let action = impute_missing(&g, &shapes, &rules);
    apply_action(&mut g, &action);
    println!("\nadded:\n{}", String::from_utf8_lossy(&serialize_ntriples(&action.additions.iter().cloned().collect())));
    Ok(())
}

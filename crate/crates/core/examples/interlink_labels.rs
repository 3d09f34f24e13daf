//! Cluster near-identical labels and link them with owl:sameAs.

use ldq::improve::{interlink_clusters, similarity};
use ldq::numeric::ratio;
use ldq::rdf::{parse_ntriples, serialize_ntriples};
use ldq::vocab::ns;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels = [("urn:a1", "water heater"), ("urn:a2", "WATER HEATER."), ("urn:a3", "fridge")];
    let text: String = labels
        .iter()
        .map(|(s, l)| format!("<{s}> <{}> \"{l}\" .\n", ns::rdfs::LABEL))
        .collect();
    let g = parse_ntriples(text.as_bytes())?;

    println!("similarity(water heater, fridge) = {}", similarity("water heater", "fridge"));
    let action = interlink_clusters(&g, &ns::rdfs::label(), &ratio(85, 100));
    print!("{}", String::from_utf8_lossy(&serialize_ntriples(&action.additions.iter().cloned().collect())));
    Ok(())
}

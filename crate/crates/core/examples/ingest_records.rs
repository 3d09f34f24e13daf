//! Map the clean fixture's CSV records to RDF.

use std::path::Path;

use ldq::ingest::{load_mapping, map_records, read_records_csv};
use ldq::vocab::load_policy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/clean");
    let records = read_records_csv(&std::fs::read(dir.join("records.csv"))?)?;
    let mapping = load_mapping(&std::fs::read(dir.join("mapping.json"))?)?;
    let policy = load_policy(&std::fs::read(dir.join("assessment.json"))?, &std::fs::read(dir.join("rules.json"))?)?;
    let at = policy.reference_time.expect("fixture rules carry a clock");

    let (graph, skipped) = map_records(&records, &mapping, at, "ldq-example")?;
    println!("{} records, {skipped} fields skipped, {} triples", records.len(), graph.len());
    for t in graph.iter().take(6) {
        println!("{t}");
    }
    Ok(())
}

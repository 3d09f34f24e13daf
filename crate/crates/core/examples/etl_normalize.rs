//! Run the four ETL steps over the defects fixture.

use std::path::Path;

use ldq::improve::{apply_action, etl_normalize};
use ldq::rdf::parse_ntriples;
use ldq::vocab::{load_policy, UnitTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/defects");
    let read = |f: &str| std::fs::read(dir.join(f));
    let mut g = parse_ntriples(&read("dataset.nt")?)?;
    let policy = load_policy(&read("assessment.json")?, &read("rules.json")?)?;

    println!("before: {} triples, {} statements", g.len(), g.raw_statement_count());
    for action in etl_normalize(&g, &policy.shapes, &UnitTable::builtin(), policy.improvement.grid_seconds) {
        println!(
            "{:<16} +{:<4} -{:<4} duplicates {}",
            action.kind.name(),
            action.additions.len(),
            action.deletions.len(),
            action.duplicates_removed
        );
        apply_action(&mut g, &action);
    }
    println!("after: {} triples, {} statements", g.len(), g.raw_statement_count());
    Ok(())
}

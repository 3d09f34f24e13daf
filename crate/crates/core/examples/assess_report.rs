//! Assess the defects fixture and print its quality report as Turtle.

use std::path::Path;

use ldq::assess::{assess, report_turtle, AssessOptions};
use ldq::ingest::{load_mapping, mapping_vocab};
use ldq::numeric::format_decimal;
use ldq::rdf::parse_ntriples;
use ldq::vocab::load_policy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/defects");
    let read = |f: &str| std::fs::read(dir.join(f));
    let graph = parse_ntriples(&read("dataset.nt")?)?;
    let policy = load_policy(&read("assessment.json")?, &read("rules.json")?)?;
    let vocab = mapping_vocab(&load_mapping(&read("mapping.json")?)?);

    let opts = AssessOptions::new("defects", policy.reference_time.unwrap()).extra_vocab(vocab);
    let report = assess(&graph, &policy, &opts);
    for m in &report.measurements {
        println!("{:<18} {}", m.metric_id, format_decimal(&m.value, 4));
    }
    println!("passed: {}, failing: {:?}\n", report.passed, report.failing_metrics());
    print!("{}", String::from_utf8_lossy(&report_turtle(&report)));
    Ok(())
}

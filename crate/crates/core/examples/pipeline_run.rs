//! Run the assess/improve loop on the recoverable fixture.

use std::path::Path;

use ldq::ingest::{load_mapping, mapping_vocab};
use ldq::numeric::format_decimal;
use ldq::pipeline::{run_pipeline, PipelineInput, RunOptions};
use ldq::rdf::parse_ntriples;
use ldq::vocab::load_policy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/recoverable");
    let read = |f: &str| std::fs::read(dir.join(f));
    let g = parse_ntriples(&read("dataset.nt")?)?;
    let policy = load_policy(&read("assessment.json")?, &read("rules.json")?)?;

    let mut opts = RunOptions::new(policy.reference_time.unwrap(), 42);
    opts.extra_vocab = mapping_vocab(&load_mapping(&read("mapping.json")?)?);
    let run = run_pipeline(PipelineInput::Graph(&g), &policy, &opts)?;

    for (report, precision) in &run.history {
        println!("round {}: passed {} failing {:?}", report.round, report.passed, report.failing_metrics());
        for p in precision {
            println!("  {} {:+} via {}", p.metric_id, format_decimal(&p.delta, 6), p.method_iri);
        }
    }
    println!("terminal {:?}, {} triples added", run.terminal, run.additions().len());
    print!("{}", run.trace_jsonl());
    Ok(())
}

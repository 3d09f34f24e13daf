//! Generate a small fixture with injected defects into a directory.

use ldq::facade::fixture::{gen_fixture, DefectKind, FixtureConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "fixture-out".into());
    let cfg = FixtureConfig::default()
        .with_seed(7)
        .with_rate(DefectKind::MissingObject, 0.05)
        .with_rate(DefectKind::Outlier, 0.02);
    let fixture = gen_fixture(&cfg)?;
    fixture.write_to(out.as_ref())?;
    for d in &fixture.manifest.injected_defects {
        println!("{:?}: {} of {}", d.kind, d.ground_truth.len(), d.population);
    }
    println!("{} records, {} triples written to {out}", fixture.records.len(), fixture.graph().len());
    Ok(())
}

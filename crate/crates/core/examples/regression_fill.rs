//! Train the time-series regressor and fill the recoverable fixture's gaps.

use std::path::Path;

use chrono::{Duration, TimeZone, Utc};
use ldq::improve::{regress_fill, train_svr};
use ldq::rdf::parse_ntriples;
use ldq::vocab::{load_policy, SvrHyper};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t0 = Utc.with_ymd_and_hms(2024, 5, 1, 0, 0, 0).unwrap();
    let points: Vec<_> = (0..24)
        .filter(|h| *h != 13)
        .map(|h| (t0 + Duration::hours(h), 2.0 + h as f64 / 2.0))
        .collect();
    let model = train_svr(&points, &SvrHyper::default())?;
    println!("hour 13: predicted {:.3}, true 8.5", model.predict(&(t0 + Duration::hours(13))));

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/recoverable");
    let read = |f: &str| std::fs::read(dir.join(f));
    let g = parse_ntriples(&read("dataset.nt")?)?;
    let policy = load_policy(&read("assessment.json")?, &read("rules.json")?)?;
    let action = regress_fill(&g, &policy.shapes, policy.improvement.grid_seconds, &policy.improvement.svr);
    println!("{} triples added", action.additions.len());
    for line in action.justification.iter().take(5) {
        println!("  {line}");
    }
    Ok(())
}

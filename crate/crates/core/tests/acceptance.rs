//! The acceptance criteria, one line each.

mod common;

use std::io::Write;

// written straight to the stream so the lines show up without --nocapture
fn line(text: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

#[test]
fn acceptance_criteria() {
    line(String::new());
    let mut failed = Vec::new();
    for (i, (name, check)) in common::criteria::all().into_iter().enumerate() {
        let n = i + 1;
        match check() {
            Ok(detail) => line(format!("PASS {n:>2} {name}: {detail}")),
            Err(reason) => {
                line(format!("FAIL {n:>2} {name}: {reason}"));
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

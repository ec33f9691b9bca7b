//! Runs the full verification suite and prints one line per criterion.

use k3lat::report::{verify_all, Status, VerifyOptions, CHECKS};
use std::io::Write;

#[test]
fn all_criteria() {
    let report = verify_all(&VerifyOptions::default()).expect("suite runs");
    assert_eq!(report.checks.len(), CHECKS.len());
    let mut failed = Vec::new();
    for (n, c) in report.checks.iter().enumerate() {
        let verdict = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        // straight to the handle so the lines survive output capture
        writeln!(std::io::stdout(), "criterion {:>2} {:<28} {verdict} ({:.2}s)", n + 1, c.id, c.elapsed).unwrap();
        if c.status != Status::Pass {
            failed.push((c.id.clone(), c.witness.clone()));
        }
    }
    assert!(failed.is_empty(), "failing checks: {failed:#?}");
    assert_eq!(report.exit_code(true), 0);
}

//! End-to-end acceptance run: every scripted criterion, one line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! pass/fail line for each criterion. The test fails if any criterion does.

use robust_aggregation::repro;

#[test]
fn all_acceptance_criteria_pass() {
    let results = repro::run_all();
    assert_eq!(results.len(), 10, "expected exactly ten criteria");

    let mut failed = Vec::new();
    for r in &results {
        println!(
            "criterion {:>2} {} [{}] {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.details
        );
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}

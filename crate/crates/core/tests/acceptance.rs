//! Acceptance suite: runs every verification criterion at its pinned
//! tolerance and prints one pass/fail line per criterion.
//!
//! Run with `cargo test -p qbrayton --test acceptance -- --nocapture` to see
//! the per-criterion report.

use qbrayton::verify::run_all;
use qbrayton::Tolerances;

#[test]
fn acceptance_criteria() {
    let results = run_all(&Tolerances::default());
    let mut failed = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<36}  {}", r.name, r.detail);
        if !r.passed {
            failed.push(r.name);
        }
    }
    assert!(
        failed.is_empty(),
        "acceptance criteria failed: {failed:?}"
    );
}

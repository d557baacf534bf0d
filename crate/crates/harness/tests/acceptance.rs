//! Runs every acceptance criterion and prints one line per criterion.

use microsob_harness::report::Verdict;
use microsob_harness::suites::{SuiteContext, SUITES};

fn main() {
    let ctx = SuiteContext { seed: 0 };
    let mut failed = Vec::new();
    for suite in SUITES {
        let checks = suite.run(&ctx);
        let bad: Vec<_> = checks
            .iter()
            .filter(|c| c.verdict != Verdict::Pass)
            .collect();
        let verdict = if bad.is_empty() && !checks.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {:>2} {:<20} {verdict} ({} checks)",
            suite.criterion,
            suite.name,
            checks.len()
        );
        for c in &bad {
            println!("    {} {}: {}", c.verdict, c.id, c.note);
        }
        if verdict == "FAIL" {
            failed.push(suite.name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}

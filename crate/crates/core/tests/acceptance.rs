use std::collections::BTreeSet;
use std::io::Write;

use deltader_core::verify::{run_suite, Profile, KNOWN_UNATTAINABLE};

#[test]
fn acceptance() {
    let report = run_suite(Profile::Full);
    // Written to the raw handle so the lines survive libtest output capture.
    let mut out = std::io::stdout().lock();
    for line in report.lines() {
        writeln!(out, "{line}").unwrap();
    }
    drop(out);
    let failing: BTreeSet<(u8, String)> = report
        .criteria
        .iter()
        .flat_map(|c| c.failing().map(move |k| (c.id, k.name.clone())))
        .collect();
    let known: BTreeSet<(u8, String)> = KNOWN_UNATTAINABLE
        .iter()
        .map(|(id, name)| (*id, name.to_string()))
        .collect();
    assert_eq!(failing, known, "failing checks differ from the documented set");
    assert_eq!(report.criteria.len(), 10);
}

#[test]
fn quick_profile_agrees_with_full_on_outcomes() {
    let quick = run_suite(Profile::Quick);
    let full = run_suite(Profile::Full);
    let outcome = |r: &deltader_core::verify::SuiteReport| -> Vec<(u8, bool)> {
        r.criteria.iter().map(|c| (c.id, c.passed)).collect()
    };
    assert_eq!(outcome(&quick), outcome(&full));
}

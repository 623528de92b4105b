//! Runs every acceptance criterion and prints one line each.
//!
//! Criterion 6 asks for the inequality `2*2^(2n+1) < n!` to fail at
//! `n = 11`, but it holds there (`2^24 < 11!`). The check is kept as
//! stated and is expected to report FAIL; the run fails if it ever passes
//! or if any other criterion fails.

use std::process::ExitCode;

use choiceless::selftest::run_all;

const EXPECTED_FAILURES: [u8; 1] = [6];

fn main() -> ExitCode {
    let results = run_all();
    let mut ok = true;
    for r in &results {
        println!("{}", r.line());
        let expected_fail = EXPECTED_FAILURES.contains(&r.id);
        if r.passed == expected_fail {
            ok = false;
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!(
        "{passed}/{} criteria pass; expected failures: {EXPECTED_FAILURES:?}",
        results.len()
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected result");
        ExitCode::FAILURE
    }
}

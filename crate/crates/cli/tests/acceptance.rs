//! Runs every acceptance criterion and prints one pass/fail line each.
//! Exits non-zero when any criterion fails.

use std::path::Path;
use std::process::ExitCode;

use cfl_cli::suite;

fn main() -> ExitCode {
    let cfl = Path::new(env!("CARGO_BIN_EXE_cfl"));
    let mut coverage = Vec::new();
    let mut failures = 0;
    println!();
    for id in suite::ALL {
        let c = suite::run_one(id, Some(cfl), &mut coverage);
        println!(
            "acceptance criterion {} {}: {} | {} ({} ms)",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail,
            c.elapsed_ms
        );
        if !c.passed {
            failures += 1;
        }
    }
    println!("{}/{} acceptance criteria passed", suite::ALL.len() - failures, suite::ALL.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

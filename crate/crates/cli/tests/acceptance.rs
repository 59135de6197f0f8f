//! The full acceptance suite, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines reach stdout unfiltered.
//! `cargo test -p svg-cli --test acceptance -- 3,7` runs a subset.

use std::process::ExitCode;

use svgcli::verify;

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .flat_map(|a| a.split(',').filter_map(|s| s.parse().ok()).collect::<Vec<u8>>())
        .collect();
    let checks = verify::run(&only);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

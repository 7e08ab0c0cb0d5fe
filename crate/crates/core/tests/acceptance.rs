//! Runs every acceptance criterion with the default configuration and prints
//! one line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nctori_core::verify::{all_passed, run_criterion, VerifyConfig, CRITERIA};

const SEED: u64 = 20240611;

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    println!("\nrunning {} acceptance criteria (seed {SEED})", CRITERIA.len());
    for (id, name) in CRITERIA {
        let start = Instant::now();
        let rows = run_criterion(id, &cfg, SEED);
        let ok = all_passed(&rows);
        let observed = rows.iter().map(|r| format!("{}: {:.2e} <= {:.0e}", r.name, r.observed, r.tolerance));
        println!(
            "criterion {id:>2} {} {name} ({:.1}s) [{}]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            observed.collect::<Vec<_>>().join("; ")
        );
        for r in rows.iter().filter(|r| !r.passed) {
            println!("    {}: {}", r.name, r.detail);
        }
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed\n", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}\n");
        ExitCode::FAILURE
    }
}

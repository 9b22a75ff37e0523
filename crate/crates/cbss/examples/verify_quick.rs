//! Run the quick verification battery in-process and print the table.
//! Equivalent to `cbss verify --level quick`.
//!
//! ```bash
//! cargo run --release -p cbss --example verify_quick
//! ```

use cbss::verify::{run_verify, Level};

fn main() {
    let report = run_verify(Level::Quick, 0);
    for c in &report.checks {
        println!(
            "[{}] {:<32} stat {:>12.5e} thr {:>12.5e}  {}",
            if c.passed() { "pass" } else { "FAIL" },
            c.check_id,
            c.statistic,
            c.threshold,
            c.claim
        );
    }
    println!("\n{} passed, {} failed", report.passed, report.failed);
    std::process::exit(if report.pass { 0 } else { 4 });
}

//! Direct particle Monte Carlo of the maximal-displacement tail, compared
//! against the asymptotic law sqrt(2/alpha) x^(-alpha/2).
//!
//! ```bash
//! cargo run --release -p cbss --example tail_monte_carlo
//! ```

use cbss::levy_path::PathConfig;
use cbss::sim::{estimate_tail, CbssConfig};
use cbss::stable::StableParams;
use cbss::stats::log_log_slope;

fn main() -> cbss::Result<()> {
    let alpha = 1.0;
    let stable = StableParams::new(alpha)?;
    let dt = 0.02;
    let path = PathConfig::hybrid(dt, (2.0 * dt / alpha).powf(1.0 / alpha))?;
    let xs = [25.0, 50.0, 100.0, 200.0];
    let cfg = CbssConfig::new(stable, path, 100_000, 8.0 * 200f64.sqrt(), 2026)?;

    let n = 100_000;
    println!("alpha = {alpha}, {n} realizations per point (early exit at the first crossing)");
    let estimates = estimate_tail(&cfg, &xs, n)?;
    println!(
        "{:>6} {:>10} {:>22} {:>10} {:>8}",
        "x", "p_hat", "95% interval", "theory", "ratio"
    );
    for e in &estimates {
        let theory = cbss::tail_theory(alpha, e.x);
        println!(
            "{:>6} {:>10.5} [{:>9.5}, {:>9.5}] {:>10.5} {:>8.4}",
            e.x, e.p_hat, e.ci_low, e.ci_high, theory, e.p_hat / theory
        );
    }
    let ps: Vec<f64> = estimates.iter().map(|e| e.p_hat).collect();
    let (slope, _) = log_log_slope(&xs, &ps);
    println!("log-log slope = {slope:.4} (asymptotic value -alpha/2 = {:.2})", -alpha / 2.0);
    Ok(())
}

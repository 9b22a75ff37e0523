//! First-passage structure of the stable path: the short-time crossing rate
//! and the conditional overshoot law `(x/A)^-alpha`.
//!
//! ```bash
//! cargo run --release -p cbss --example first_passage
//! ```

use cbss::levy_path::{first_passage_up, overshoot_conditional_tail, PathConfig};
use cbss::rng::substream;
use cbss::stable::{levy_tail_mass, StableParams};

fn main() -> cbss::Result<()> {
    let alpha = 1.0;
    let params = StableParams::new(alpha)?;
    let mut rng = substream(11, 0);

    // eps^-1 P(tau_A < eps) -> lambda[A, inf)
    let (a, eps, n) = (5.0, 1e-2, 300_000u64);
    let cfg = PathConfig::hybrid_default(alpha, eps / 8.0)?;
    let mut hits = 0u64;
    for _ in 0..n {
        if !first_passage_up(&params, &cfg, 0.0, a, eps, &mut rng).censored {
            hits += 1;
        }
    }
    let rate = hits as f64 / n as f64 / eps;
    println!(
        "short-time crossing rate of level {a}: {rate:.4} vs lambda[A,inf) = {:.4}",
        levy_tail_mass(&params, a)?
    );

    // overshoot law: crossings in a short window land like the Levy tail
    for &x in &[1.5, 2.0, 4.0] {
        let est = overshoot_conditional_tail(&params, 1.0, x, 1e-3, 300_000, &mut rng)?;
        println!(
            "P(X_tau > {x} | tau_1 < 1e-3) = {:.4} +- {:.4}   vs (x/A)^-alpha = {:.4}   [{} events]",
            est.p_hat,
            est.se,
            x.powf(-alpha),
            est.conditioning_events
        );
    }
    Ok(())
}

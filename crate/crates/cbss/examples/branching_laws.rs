//! Exact laws of the critical binary skeleton: survival 2/(t+2), the
//! Catalan progeny distribution and its square-root tail.
//!
//! ```bash
//! cargo run --release -p cbss --example branching_laws
//! ```

use cbss::branching::{
    population_at, progeny_pmf, progeny_tail_exact, sample_progeny, sample_tree,
    survival_prob_exact,
};
use cbss::rng::substream;

fn main() -> cbss::Result<()> {
    let mut rng = substream(5, 0);
    let n = 100_000;

    let ts = [1.0, 2.0, 5.0, 10.0];
    let mut alive = [0u64; 4];
    for _ in 0..n {
        let tree = sample_tree(&mut rng, 10_000_000, 12.0);
        for (i, &t) in ts.iter().enumerate() {
            if population_at(&tree, t)? > 0 {
                alive[i] += 1;
            }
        }
    }
    println!("{:>6} {:>12} {:>12}", "t", "empirical", "2/(t+2)");
    for (i, &t) in ts.iter().enumerate() {
        println!(
            "{t:>6.1} {:>12.5} {:>12.5}",
            alive[i] as f64 / n as f64,
            survival_prob_exact(t)?
        );
    }

    println!("\ntotal progeny (odd support, Catalan weights):");
    let mut counts = std::collections::HashMap::<usize, u64>::new();
    for _ in 0..n {
        let (progeny, _) = sample_progeny(&mut rng, 1_000_000);
        *counts.entry(progeny).or_default() += 1;
    }
    println!("{:>6} {:>12} {:>12}", "xi", "empirical", "exact");
    for k in 0..5 {
        let xi = 2 * k + 1;
        println!(
            "{xi:>6} {:>12.5} {:>12.5}",
            counts.get(&xi).copied().unwrap_or(0) as f64 / n as f64,
            progeny_pmf(k)
        );
    }
    println!("\nsqrt(m) P(xi >= m) stays bounded (the heavy tail behind infinite E xi):");
    for &m in &[100usize, 1000, 10_000] {
        println!("  m = {m:>6}: {:.4}", (m as f64).sqrt() * progeny_tail_exact(m));
    }
    Ok(())
}

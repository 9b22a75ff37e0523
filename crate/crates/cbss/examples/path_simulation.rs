//! Simulate one trajectory with the hybrid jump-diffusion scheme and show
//! the explicit big-jump decomposition.
//!
//! ```bash
//! cargo run --release -p cbss --example path_simulation
//! ```

use cbss::levy_path::{running_max, simulate_path, PathConfig};
use cbss::rng::substream;
use cbss::stable::StableParams;

fn main() -> cbss::Result<()> {
    let alpha = 1.0;
    let params = StableParams::new(alpha)?;
    let cfg = PathConfig::hybrid(0.01, 0.5)?;
    let mut rng = substream(42, 0);
    let path = simulate_path(&params, &cfg, 0.0, 10.0, &mut rng)?;

    println!(
        "skeleton points: {}, big jumps (|size| > {}): {}",
        path.times.len(),
        cfg.jump_threshold,
        path.big_jumps.len()
    );
    println!("final value X_10 = {:.4}", path.values.last().unwrap());
    for t in [1.0, 2.0, 5.0, 10.0] {
        println!("running max over [0, {t:>4}] = {:.4}", running_max(&path, t)?);
    }
    println!("\nfive largest jumps:");
    let mut jumps = path.big_jumps.clone();
    jumps.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    for (t, size) in jumps.iter().take(5) {
        println!("  t = {t:>7.4}  size = {size:>9.4}");
    }
    Ok(())
}

//! The path-integral route: the Feynman-Kac image of the solved boundary
//! value problem reproduces the solution (fixed-point property), and the
//! stopped exponential is a martingale.
//!
//! ```bash
//! cargo run --release -p cbss --example feynman_kac
//! ```

use cbss::bvp::{solve_bvp, Grid, SolverConfig};
use cbss::fk::{fk_estimate, martingale_check, CandidateU};
use cbss::levy_path::PathConfig;
use cbss::stable::StableParams;

fn main() -> cbss::Result<()> {
    let alpha = 1.0;
    let stable = StableParams::new(alpha)?;
    let grid = Grid::geometric(1e-3, 1e4, 480)?;
    let solved = solve_bvp(&stable, &grid, &SolverConfig::default())?;
    let candidate = CandidateU::Grid(solved.clone());
    let path_cfg = PathConfig::hybrid(0.05, 0.1)?;

    println!("u(x) = E^x[ exp(-1/2 int_0^tau u(X_s) ds) ] with tau = first passage below 0\n");
    println!("{:>6} {:>12} {:>12} {:>8}", "x", "fk estimate", "bvp u(x)", "ratio");
    for &x in &[10.0, 25.0, 100.0] {
        let est = fk_estimate(x, &candidate, &stable, &path_cfg, 20_000, 50.0, 99)?;
        let u_val = solved.eval(x);
        println!(
            "{x:>6} {:>12.5} {:>12.5} {:>8.4}   (se {:.5}, censored mass {:.2e})",
            est.mean,
            u_val,
            est.mean / u_val,
            est.std_err,
            est.censored_mass
        );
    }

    let report = martingale_check(&solved, 20.0, &[0.5, 1.0, 2.0, 5.0], 20_000, &stable, &path_cfg, 7)?;
    println!("\nmartingale constancy at x = 20: u(x) = {:.5}", report.u_x);
    for ((t, mean), se) in report.t_list.iter().zip(&report.means).zip(&report.std_errs) {
        println!("  E Z_{t:<4} = {mean:.5} +- {se:.5}");
    }
    println!("max deviation {:.2} standard errors", report.max_dev_in_se);
    Ok(())
}

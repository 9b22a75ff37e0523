//! Solve the nonlinear fractional boundary value problem
//! `(-Delta)^(alpha/2) u + u^2/2 = 0` on the half-line and read off the
//! tail constant.
//!
//! ```bash
//! cargo run --release -p cbss --example solve_bvp
//! ```

use cbss::bvp::{solve_bvp_report, Grid, SolverConfig};
use cbss::stable::StableParams;

fn main() -> cbss::Result<()> {
    let alpha = 1.0;
    let stable = StableParams::new(alpha)?;
    let grid = Grid::geometric(1e-3, 1e4, 480)?;
    let report = solve_bvp_report(&stable, &grid, &SolverConfig::default())?;
    println!(
        "converged in {} Newton steps, residual sup-norm {:.2e}, start multiplier {}",
        report.iterations, report.residual_sup, report.start_multiplier
    );
    let u = &report.u;
    println!("far-field closure: u(y) = {:.4} y^(-{}) beyond L", u.far_field_coeff(), alpha / 2.0);
    println!("\n{:>10} {:>10} {:>14}", "x", "u(x)", "x^(a/2) u(x)");
    for &x in &[1.0, 10.0, 100.0, 1000.0, 5000.0] {
        println!("{x:>10.0} {:>10.5} {:>14.5}", u.eval(x), x.powf(alpha / 2.0) * u.eval(x));
    }
    println!(
        "\ntail constant sqrt(2/alpha) = {:.5}; at x = L/2 the solve gives {:.5}",
        cbss::tail_constant(alpha),
        (grid.l() / 2.0).powf(alpha / 2.0) * u.eval(grid.l() / 2.0)
    );
    Ok(())
}

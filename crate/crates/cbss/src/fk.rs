//! Monte Carlo evaluation of the Feynman-Kac representation
//! `u(x) = E^x[ exp(-1/2 int_0^tau u(X_s) ds) ]`, where `tau` is the first
//! passage below zero: the third, path-integral route to the tail law.
//!
//! A candidate `u` is either a solved grid function or a clipped power
//! ansatz. Candidates evaluate to exactly 1 on `y <= 0`, so the exponent
//! never integrates past the stopping time. Paths that exhaust the horizon
//! carry an unresolved factor in `[0, 1]`; their weight `exp(-Psi/2)` is the
//! censored mass, reported and bracketed (the default horizon `50 x^alpha`
//! makes it negligible because `Psi` grows like `sqrt(t)` along surviving
//! paths).

use crate::bvp::GridFunction;
use crate::levy_path::{Motion, PathConfig, SamplePath};
use crate::quad::kahan_sum;
use crate::rng::substream;
use crate::stable::{levy_tail_mass, StableParams};
use crate::stats;
use crate::{Error, Result};
use rayon::prelude::*;

/// Candidate tail function fed to the Feynman-Kac machinery.
#[derive(Debug, Clone)]
pub enum CandidateU {
    Grid(GridFunction),
    /// `min(1, c y^(-alpha/2))` for `y > 0`, `1` for `y <= 0`.
    Ansatz { c: f64, alpha: f64 },
}

impl CandidateU {
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            CandidateU::Grid(g) => g.eval(y),
            CandidateU::Ansatz { c, alpha } => {
                if y <= 0.0 {
                    1.0
                } else {
                    (c * y.powf(-alpha / 2.0)).min(1.0)
                }
            }
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            CandidateU::Grid(g) => g.alpha(),
            CandidateU::Ansatz { alpha, .. } => *alpha,
        }
    }
}

/// Trapezoidal path integral `int_0^t u(X_s) ds` along the skeleton, with
/// jump times entering exactly (the pre-jump left limit closes each
/// segment that ends in a recorded jump).
pub fn path_integral(path: &SamplePath, u: &CandidateU, t_stop: f64) -> Result<f64> {
    if t_stop < 0.0 || t_stop > path.last_time() + 1e-12 {
        return Err(Error::domain(format!(
            "t_stop = {t_stop} outside the recorded horizon {}",
            path.last_time()
        )));
    }
    let mut jump_iter = path.big_jumps.iter().peekable();
    let mut psi = 0.0;
    for k in 1..path.times.len() {
        let (t0, t1) = (path.times[k - 1], path.times[k]);
        let (v0, mut v1) = (path.values[k - 1], path.values[k]);
        // subtract the jump if this skeleton point is a jump time
        while let Some(&&(tj, size)) = jump_iter.peek() {
            if tj < t1 {
                jump_iter.next();
            } else {
                if tj == t1 {
                    v1 -= size;
                }
                break;
            }
        }
        if t_stop <= t1 {
            let frac = if t1 > t0 { (t_stop - t0) / (t1 - t0) } else { 0.0 };
            let v_stop = v0 + (v1 - v0) * frac;
            psi += 0.5 * (u.eval(v0) + u.eval(v_stop)) * (t_stop - t0);
            return Ok(psi);
        }
        psi += 0.5 * (u.eval(v0) + u.eval(v1)) * (t1 - t0);
    }
    Ok(psi)
}

/// Monte Carlo estimate of the Feynman-Kac expectation at one point.
#[derive(Debug, Clone, Copy)]
pub struct FkEstimate {
    pub x: f64,
    pub n: u64,
    pub mean: f64,
    pub std_err: f64,
    pub censored_count: u64,
    /// Unresolved weight `sum exp(-Psi_horizon/2) / n`; the mean carries
    /// half of it, so the bracket is `mean -/+ censored_mass/2`.
    pub censored_mass: f64,
}

impl FkEstimate {
    /// Censored mass above 0.1% of the estimate.
    pub fn flagged(&self) -> bool {
        self.censored_mass > 1e-3 * self.mean.max(1e-12)
    }
}

/// Estimate `E^x[exp(-Psi_tau / 2)]` over `n` paths started at `x`,
/// stopping at the first skeleton point `<= 0` or at `horizon_mult x^alpha`.
pub fn fk_estimate(
    x: f64,
    u: &CandidateU,
    stable: &StableParams,
    path_cfg: &PathConfig,
    n: u64,
    horizon_mult: f64,
    seed: u64,
) -> Result<FkEstimate> {
    if x <= 0.0 {
        return Err(Error::domain("start point must be positive"));
    }
    if n == 0 {
        return Err(Error::domain("need at least one path"));
    }
    let horizon = horizon_mult * x.powf(stable.alpha());
    let results: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            fk_one_path(x, u, stable, path_cfg, horizon, &mut rng)
        })
        .collect();
    let censored_count = results.iter().filter(|r| r.1 > 0.0).count() as u64;
    let censored_mass = kahan_sum(&results.iter().map(|r| r.1).collect::<Vec<_>>()) / n as f64;
    let values: Vec<f64> = results.into_iter().map(|r| r.0).collect();
    let (mean, std_err) = stats::mean_se(&values);
    Ok(FkEstimate { x, n, mean, std_err, censored_count, censored_mass })
}

/// One path contribution: `(z, censored_weight)`.
fn fk_one_path<R: rand::Rng + ?Sized>(
    x: f64,
    u: &CandidateU,
    stable: &StableParams,
    path_cfg: &PathConfig,
    horizon: f64,
    rng: &mut R,
) -> (f64, f64) {
    let mut motion = Motion::new(stable, path_cfg, x, horizon, rng);
    let mut psi = 0.0;
    let mut prev_t = 0.0;
    let mut prev_u = u.eval(x);
    while let Some(ev) = motion.next_event() {
        let pre_jump = ev.value - ev.jump.unwrap_or(0.0);
        psi += 0.5 * (prev_u + u.eval(pre_jump)) * (ev.t - prev_t);
        if ev.value <= 0.0 {
            // stopped: u(X_tau) = 1 on the negative half-line
            return ((-0.5 * psi).exp(), 0.0);
        }
        prev_t = ev.t;
        prev_u = u.eval(ev.value);
    }
    // horizon exhausted: the remaining factor lies in [0, 1]; carry the
    // midpoint and report the unresolved weight
    let w = (-0.5 * psi).exp();
    (0.5 * w, w)
}

/// `E[exp(-nu theta)] = rate / (rate + theta)` for `nu ~ Exp(rate)`.
pub fn exp_jump_expectation(rate: f64, theta: f64) -> Result<f64> {
    if rate <= 0.0 {
        return Err(Error::domain(format!("rate must be positive, got {rate}")));
    }
    if theta < 0.0 {
        return Err(Error::domain(format!("theta must be non-negative, got {theta}")));
    }
    Ok(rate / (rate + theta))
}

/// Root of the one-jump self-consistency equation
/// `u = Lambda / (Lambda + u/2)` with `Lambda = lambda[(1-2 delta) x, inf)`:
/// the positive solution `-Lambda + sqrt(Lambda^2 + 2 Lambda)`, which tends
/// to `sqrt(2/alpha) x^(-alpha/2) (1 + O(delta) + O(x^(-alpha/2)))`.
pub fn one_jump_tail_root(stable: &StableParams, x: f64, delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta < 0.5) {
        return Err(Error::domain("delta must lie in [0, 1/2)"));
    }
    let lambda = levy_tail_mass(stable, (1.0 - 2.0 * delta) * x)?;
    Ok(-lambda + (lambda * lambda + 2.0 * lambda).sqrt())
}

/// Fixed-point iteration of the Feynman-Kac map on a coarse grid.
#[derive(Debug, Clone)]
pub struct FkFixedPoint {
    pub u: GridFunction,
    pub std_errs: Vec<f64>,
    /// Raw (pre-smoothing) Monte Carlo values of the last iteration.
    pub raw_last: Vec<f64>,
    /// Sup-distance between successive relaxed iterates.
    pub sup_deltas: Vec<f64>,
}

/// Knobs for [`fk_fixed_point`].
#[derive(Debug, Clone, Copy)]
pub struct FkFixedPointConfig {
    pub iters: usize,
    pub n_per_node: u64,
    pub horizon_mult: f64,
    /// Mixing weight on the new image. The map is antitone (a larger
    /// candidate shrinks its image), so plain iteration oscillates around
    /// the fixed point; mixing near 1/2 cancels the oscillation.
    pub relax: f64,
    pub seed: u64,
}

impl Default for FkFixedPointConfig {
    fn default() -> Self {
        FkFixedPointConfig { iters: 10, n_per_node: 2000, horizon_mult: 50.0, relax: 0.5, seed: 1 }
    }
}

/// Repeatedly replace `u` by its Feynman-Kac image evaluated at the grid
/// nodes, smoothing the Monte Carlo noise by monotone regression before
/// reuse. Aborts when the successive sup-distance grows three times in a
/// row (non-contraction).
pub fn fk_fixed_point(
    initial: &CandidateU,
    grid: crate::bvp::Grid,
    stable: &StableParams,
    path_cfg: &PathConfig,
    cfg: &FkFixedPointConfig,
) -> Result<FkFixedPoint> {
    if cfg.iters == 0 {
        return Err(Error::domain("need at least one iteration"));
    }
    if !(cfg.relax > 0.0 && cfg.relax <= 1.0) {
        return Err(Error::domain("relax must lie in (0, 1]"));
    }
    let alpha = stable.alpha();
    let nodes: Vec<f64> = grid.nodes().to_vec();
    let mut current: Vec<f64> = nodes.iter().map(|&x| initial.eval(x)).collect();
    let mut sup_deltas: Vec<f64> = Vec::new();
    let mut growth_streak = 0usize;
    let mut last_se = vec![0.0; nodes.len()];
    let mut last_raw = current.clone();
    for iter in 0..cfg.iters {
        let candidate = CandidateU::Grid(GridFunction::new(grid.clone(), current.clone(), alpha)?);
        let mut raw = Vec::with_capacity(nodes.len());
        let mut ses = Vec::with_capacity(nodes.len());
        for (j, &xj) in nodes.iter().enumerate() {
            let est = fk_estimate(
                xj,
                &candidate,
                stable,
                path_cfg,
                cfg.n_per_node,
                cfg.horizon_mult,
                cfg.seed ^ ((iter as u64) << 40) ^ ((j as u64) << 24),
            )?;
            raw.push(est.mean);
            ses.push(est.std_err);
        }
        let weights: Vec<f64> = ses.iter().map(|s| 1.0 / (s * s).max(1e-12)).collect();
        let smooth = stats::isotonic_non_increasing(&raw, &weights);
        let mixed: Vec<f64> = smooth
            .iter()
            .zip(&current)
            .map(|(s, c)| ((1.0 - cfg.relax) * c + cfg.relax * s).clamp(1e-12, 1.0))
            .collect();
        let sup: f64 = mixed
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if let Some(&prev) = sup_deltas.last() {
            if sup > prev {
                growth_streak += 1;
                if growth_streak >= 3 {
                    return Err(Error::Diverging(format!(
                        "sup-distance grew three times in a row: {sup_deltas:?} -> {sup}"
                    )));
                }
            } else {
                growth_streak = 0;
            }
        }
        sup_deltas.push(sup);
        current = mixed;
        last_se = ses;
        last_raw = raw;
    }
    Ok(FkFixedPoint {
        u: GridFunction::new(grid, current, alpha)?,
        std_errs: last_se,
        raw_last: last_raw,
        sup_deltas,
    })
}

/// Constancy report for the stopped Feynman-Kac martingale
/// `Z_t = exp(-Psi_{t and tau}/2) u(X_{t and tau})`.
#[derive(Debug, Clone)]
pub struct MartingaleReport {
    pub u_x: f64,
    pub t_list: Vec<f64>,
    pub means: Vec<f64>,
    pub std_errs: Vec<f64>,
    /// Largest `|mean - u(x)| / se` over the checkpoints.
    pub max_dev_in_se: f64,
}

/// Check that `E[Z_{t and tau}] = u(x)` for each checkpoint in `t_list`.
///
/// Sampling happens at the first skeleton point past each checkpoint (a
/// bounded stopping time, so constancy still holds exactly).
pub fn martingale_check(
    u: &GridFunction,
    x: f64,
    t_list: &[f64],
    n: u64,
    stable: &StableParams,
    path_cfg: &PathConfig,
    seed: u64,
) -> Result<MartingaleReport> {
    if x <= 0.0 {
        return Err(Error::domain("start point must be positive"));
    }
    let mut ts = t_list.to_vec();
    ts.sort_by(f64::total_cmp);
    if ts.is_empty() || ts[0] <= 0.0 {
        return Err(Error::domain("checkpoints must be positive"));
    }
    let t_max = *ts.last().unwrap();
    let per_path: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let mut motion = Motion::new(stable, path_cfg, x, t_max, &mut rng);
            let mut psi = 0.0;
            let mut prev_t = 0.0;
            let mut prev_u = u.eval(x);
            let mut zs = Vec::with_capacity(ts.len());
            let mut checkpoint = 0usize;
            let mut stopped: Option<f64> = None;
            while let Some(ev) = motion.next_event() {
                if stopped.is_none() {
                    let pre_jump = ev.value - ev.jump.unwrap_or(0.0);
                    psi += 0.5 * (prev_u + u.eval(pre_jump)) * (ev.t - prev_t);
                    prev_t = ev.t;
                    prev_u = u.eval(ev.value);
                    if ev.value <= 0.0 {
                        stopped = Some((-0.5 * psi).exp()); // u = 1 below zero
                    }
                }
                while checkpoint < ts.len() && ev.t >= ts[checkpoint] {
                    let z = stopped.unwrap_or_else(|| (-0.5 * psi).exp() * prev_u);
                    zs.push(z);
                    checkpoint += 1;
                }
            }
            while checkpoint < ts.len() {
                let z = stopped.unwrap_or_else(|| (-0.5 * psi).exp() * prev_u);
                zs.push(z);
                checkpoint += 1;
            }
            zs
        })
        .collect();
    let u_x = u.eval(x);
    let mut means = Vec::with_capacity(ts.len());
    let mut std_errs = Vec::with_capacity(ts.len());
    let mut max_dev: f64 = 0.0;
    for k in 0..ts.len() {
        let column: Vec<f64> = per_path.iter().map(|zs| zs[k]).collect();
        let (mean, se) = stats::mean_se(&column);
        max_dev = max_dev.max((mean - u_x).abs() / se);
        means.push(mean);
        std_errs.push(se);
    }
    Ok(MartingaleReport { u_x, t_list: ts, means, std_errs, max_dev_in_se: max_dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::{solve_bvp, Grid, SolverConfig};
    use crate::levy_path::simulate_path;

    fn stable(alpha: f64) -> StableParams {
        StableParams::new(alpha).unwrap()
    }

    #[test]
    fn candidate_evaluation_rules() {
        let a = CandidateU::Ansatz { c: 2.0, alpha: 1.0 };
        assert_eq!(a.eval(-1.0), 1.0);
        assert_eq!(a.eval(0.0), 1.0);
        assert_eq!(a.eval(1.0), 1.0); // clipped
        assert!((a.eval(16.0) - 0.5).abs() < 1e-15);
        let zero = CandidateU::Ansatz { c: 0.0, alpha: 1.0 };
        assert_eq!(zero.eval(5.0), 0.0);
        assert_eq!(zero.eval(-5.0), 1.0);
    }

    #[test]
    fn path_integral_exact_cases() {
        // constant path in the boundary region: u = 1, Psi = t
        let path = SamplePath {
            times: vec![0.0, 0.5, 1.25, 2.0],
            values: vec![-1.0, -2.0, -0.5, -3.0],
            big_jumps: vec![],
            censored: false,
        };
        let u = CandidateU::Ansatz { c: 1.0, alpha: 1.0 };
        assert!((path_integral(&path, &u, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((path_integral(&path, &u, 1.3).unwrap() - 1.3).abs() < 1e-14);
        // synthetic constant path at x0 > 0: t * u(x0)
        let x0 = 9.0;
        let path = SamplePath {
            times: vec![0.0, 1.0, 3.0],
            values: vec![x0, x0, x0],
            big_jumps: vec![],
            censored: false,
        };
        let u = CandidateU::Ansatz { c: 2.0, alpha: 1.0 };
        let expect = 3.0 * (2.0 / 3.0);
        assert!((path_integral(&path, &u, 3.0).unwrap() - expect).abs() < 1e-14);
        assert!(path_integral(&path, &u, 5.0).is_err());
    }

    #[test]
    fn path_integral_uses_pre_jump_left_limits() {
        // one big jump at t = 1 from 4 to 44: the first segment must be
        // weighted with u(4), not u(44)
        let path = SamplePath {
            times: vec![0.0, 1.0, 2.0],
            values: vec![4.0, 44.0, 44.0],
            big_jumps: vec![(1.0, 40.0)],
            censored: false,
        };
        let u = CandidateU::Ansatz { c: 1.0, alpha: 2.0 - 1e-9 }; // ~ 1/y
        let psi = path_integral(&path, &u, 2.0).unwrap();
        let expect = 0.5 * (u.eval(4.0) + u.eval(4.0)) + 0.5 * (u.eval(44.0) + u.eval(44.0));
        assert!((psi - expect).abs() < 1e-12, "{psi} vs {expect}");
    }

    #[test]
    fn path_integral_refines_under_dt_halving() {
        let p = stable(1.0);
        let u = CandidateU::Ansatz { c: (2.0f64).sqrt(), alpha: 1.0 };
        let mut rng = substream(31, 0);
        for _ in 0..50 {
            let coarse_cfg = PathConfig::hybrid_default(1.0, 0.02).unwrap();
            let path = simulate_path(&p, &coarse_cfg, 5.0, 1.0, &mut rng).unwrap();
            let full = path_integral(&path, &u, 1.0).unwrap();
            // integrate on the native skeleton vs a twice-coarser sampling of
            // the same skeleton
            let half: f64 = {
                let mut psi = 0.0;
                let mut k = 0;
                while k + 2 < path.times.len() {
                    psi += 0.5
                        * (u.eval(path.values[k]) + u.eval(path.values[k + 2]))
                        * (path.times[k + 2] - path.times[k]);
                    k += 2;
                }
                if k + 1 < path.times.len() {
                    psi += 0.5
                        * (u.eval(path.values[k]) + u.eval(*path.values.last().unwrap()))
                        * (path.times[k + 1] - path.times[k]);
                }
                psi
            };
            assert!((full - half).abs() < 0.02 * full.abs().max(0.05), "{full} vs {half}");
        }
    }

    #[test]
    fn exp_jump_closed_form_and_mc() {
        assert_eq!(exp_jump_expectation(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(exp_jump_expectation(1.0, 1.0).unwrap(), 0.5);
        assert!(exp_jump_expectation(0.0, 1.0).is_err());
        assert!(exp_jump_expectation(1.0, -0.1).is_err());
        // MC cross-check at (rate, theta) = (0.01, 0.07)
        let (rate, theta) = (0.01, 0.07);
        let mut rng = substream(32, 0);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                let nu = -(1.0 - rand::Rng::random::<f64>(&mut rng)).ln() / rate;
                (-nu * theta).exp()
            })
            .collect();
        let (mean, se) = stats::mean_se(&draws);
        let exact = exp_jump_expectation(rate, theta).unwrap();
        assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
    }

    #[test]
    fn zero_candidate_gives_unit_estimate() {
        let p = stable(1.0);
        let cfg = PathConfig::hybrid_default(1.0, 0.05).unwrap();
        let u = CandidateU::Ansatz { c: 0.0, alpha: 1.0 };
        let est = fk_estimate(3.0, &u, &p, &cfg, 2000, 50.0, 33).unwrap();
        assert!(est.censored_count == 0 || est.censored_mass > 0.0);
        // exp(0) = 1 on every resolved path; censored paths carry 1/2
        assert!(est.mean > 0.999 - est.censored_mass, "mean {}", est.mean);
    }

    #[test]
    fn fk_image_approaches_one_near_zero() {
        // the image tends to 1 as x -> 0+ at the boundary-layer rate
        // x^(alpha/2); the step must resolve the layer (dt << x^alpha)
        let p = stable(1.0);
        let u = CandidateU::Ansatz { c: (2.0f64).sqrt(), alpha: 1.0 };
        let fine = PathConfig::hybrid_default(1.0, 1e-4).unwrap();
        let near = fk_estimate(1e-3, &u, &p, &fine, 4000, 50.0, 34).unwrap();
        assert!(near.mean > 0.95, "fk at 1e-3 should be ~1, got {}", near.mean);
        let coarse = PathConfig::hybrid_default(1.0, 5e-3).unwrap();
        let mid = fk_estimate(0.1, &u, &p, &coarse, 4000, 50.0, 34).unwrap();
        assert!(
            near.mean > mid.mean + 0.02,
            "approach to 1 must be monotone: {} at 1e-3 vs {} at 0.1",
            near.mean,
            mid.mean
        );
    }

    #[test]
    fn fk_estimate_matches_bvp_solution() {
        // fixed-point property: the FK image of the solved u is u itself
        let p = stable(1.0);
        let grid = Grid::geometric(1e-3, 1e3, 160).unwrap();
        let solved = solve_bvp(&p, &grid, &SolverConfig::default()).unwrap();
        let candidate = CandidateU::Grid(solved.clone());
        let cfg = PathConfig::hybrid_default(1.0, 0.04).unwrap();
        for &x in &[10.0, 30.0] {
            let est = fk_estimate(x, &candidate, &p, &cfg, 15_000, 50.0, 35).unwrap();
            let expect = solved.eval(x);
            assert!(
                (est.mean - expect).abs() < 3.0 * est.std_err + 0.02 * expect,
                "x={x}: fk {} vs bvp {expect} (se {})",
                est.mean,
                est.std_err
            );
            assert!(!est.flagged(), "censored mass {}", est.censored_mass);
        }
    }

    #[test]
    fn one_jump_root_reproduces_tail_constant() {
        // solving u = Lambda/(Lambda + u/2) and letting the jump window
        // sharpen reproduces sqrt(2/alpha) x^(-alpha/2) up to O(delta)
        for &alpha in &[0.5, 1.0, 1.5] {
            let p = stable(alpha);
            let delta = 1e-3;
            // far enough out that sqrt(Lambda) corrections are below delta
            let x = (1e-6f64).powf(-2.0 / alpha);
            let root = one_jump_tail_root(&p, x, delta).unwrap();
            let ratio = root / crate::tail_theory(alpha, x);
            assert!(
                (ratio - 1.0).abs() < 10.0 * delta,
                "alpha={alpha}: ratio {ratio}"
            );
        }
        assert!(one_jump_tail_root(&stable(1.0), 10.0, 0.5).is_err());
    }

    #[test]
    fn martingale_constancy_and_negative_control() {
        let p = stable(1.0);
        let grid = Grid::geometric(1e-3, 1e3, 160).unwrap();
        let solved = solve_bvp(&p, &grid, &SolverConfig::default()).unwrap();
        let cfg = PathConfig::hybrid_default(1.0, 0.02).unwrap();
        let x = 20.0;
        let ts = [0.5, 1.0, 2.0, 5.0];
        let report = martingale_check(&solved, x, &ts, 30_000, &p, &cfg, 36).unwrap();
        assert!(
            report.max_dev_in_se < 3.5,
            "constancy broken: {} se (means {:?} vs u(x) = {})",
            report.max_dev_in_se,
            report.means,
            report.u_x
        );
        // negative control: scale u by 1.5 and the drift must show
        let perturbed_values: Vec<f64> =
            solved.values().iter().map(|v| (1.5 * v).min(1.0)).collect();
        let perturbed =
            GridFunction::new(solved.grid().clone(), perturbed_values, 1.0).unwrap();
        let bad = martingale_check(&perturbed, x, &ts, 30_000, &p, &cfg, 36).unwrap();
        assert!(
            bad.max_dev_in_se > 5.0,
            "perturbed candidate should fail: {} se",
            bad.max_dev_in_se
        );
    }

    #[test]
    fn fixed_point_contracts_from_supersolution() {
        let p = stable(1.0);
        let grid = Grid::geometric(0.5, 100.0, 11).unwrap();
        let start = CandidateU::Ansatz { c: 3.0, alpha: 1.0 };
        let path_cfg = PathConfig::hybrid_default(1.0, 0.05).unwrap();
        let cfg = FkFixedPointConfig {
            iters: 10,
            n_per_node: 1200,
            horizon_mult: 40.0,
            relax: 0.5,
            seed: 37,
        };
        let fp = fk_fixed_point(&start, grid, &p, &path_cfg, &cfg).unwrap();
        // iterates settle to within a few MC standard errors of each other
        let noise = fp.std_errs.iter().cloned().fold(0.0f64, f64::max);
        let last = *fp.sup_deltas.last().unwrap();
        assert!(last < 2.0 * (2.0 * noise).max(0.015), "sup delta {last}, noise {noise}");
        assert!(
            fp.sup_deltas.first().unwrap() > fp.sup_deltas.last().unwrap(),
            "deltas must shrink: {:?}",
            fp.sup_deltas
        );
        // monotone non-increasing output
        assert!(fp.u.values().windows(2).all(|w| w[1] <= w[0] + 1e-12));
        // tail constant in the right neighborhood at x = 100
        let scaled = 100.0f64.sqrt() * fp.u.eval(100.0);
        assert!(
            (scaled / crate::tail_constant(1.0) - 1.0).abs() < 0.2,
            "x^(1/2) u(100) = {scaled}"
        );
    }
}

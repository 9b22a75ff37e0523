//! Command-line front end: configuration, deterministic seeding, result
//! persistence, and the `verify` meta-command.
//!
//! Every flag can also come from a flat `key=value` config file passed with
//! `--config`; explicit flags override file entries. One root seed drives
//! counter-based substreams per task, so results are byte-identical for any
//! `--workers` setting.
//!
//! Exit codes: 0 success, 2 usage/validation error, 3 numeric failure,
//! 4 verification failures present.

use crate::bvp::{FracLaplacianOp, Grid, SolverConfig};
use crate::fk::{fk_estimate, CandidateU};
use crate::levy_path::{simulate_path, PathConfig};
use crate::rng::substream;
use crate::sim::{estimate_tail, simulate_realization, CbssConfig};
use crate::stable::{sample_stable, StableParams};
use crate::verify::{run_verify, Level};
use crate::Error;
use clap::{Args, Parser, Subcommand};
use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "cbss",
    about = "Critical branching symmetric alpha-stable process: simulation, BVP solving, Feynman-Kac estimation and verification",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw displacement samples (or one full path with --path).
    SampleStable(SampleStableArgs),
    /// Run a single particle-system realization and report its outcome.
    SimulateCbss(SimulateArgs),
    /// Monte Carlo estimate of the maximal-displacement tail P{M >= x}.
    EstimateTail(EstimateTailArgs),
    /// Solve the nonlinear fractional boundary value problem.
    SolveBvp(SolveBvpArgs),
    /// Feynman-Kac path-integral check of a candidate tail function.
    FkCheck(FkCheckArgs),
    /// Run the verification battery and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Stability exponent in (0, 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Root seed for all substreams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Flat key=value defaults file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SampleStableArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Elapsed time of each displacement.
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    pub n: Option<u64>,
    /// Emit one trajectory (time,value CSV plus a .jumps.csv sidecar)
    /// instead of i.i.d. samples.
    #[arg(long)]
    pub path: bool,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_parser = ["grid", "hybrid"])]
    pub scheme: Option<String>,
    #[arg(long)]
    pub jump_threshold: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Crossing threshold.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_parser = ["grid", "hybrid"])]
    pub scheme: Option<String>,
    #[arg(long)]
    pub jump_threshold: Option<f64>,
    #[arg(long)]
    pub progeny_cap: Option<usize>,
    #[arg(long)]
    pub time_cap: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct EstimateTailArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Threshold (repeatable).
    #[arg(long = "x")]
    pub xs: Vec<f64>,
    /// Realizations per threshold.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_parser = ["grid", "hybrid"])]
    pub scheme: Option<String>,
    #[arg(long)]
    pub jump_threshold: Option<f64>,
    #[arg(long)]
    pub progeny_cap: Option<usize>,
    #[arg(long)]
    pub time_cap: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct SolveBvpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Mesh cutoff.
    #[arg(long = "L", alias = "l")]
    pub l: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_parser = ["uniform", "geometric"])]
    pub grading: Option<String>,
    /// First mesh node (geometric grading).
    #[arg(long)]
    pub first: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub damping: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct FkCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Evaluation point (repeatable).
    #[arg(long = "x")]
    pub xs: Vec<f64>,
    /// Paths per point.
    #[arg(long)]
    pub n: Option<u64>,
    /// Candidate: "bvp" (solve first) or "ansatz:<c>".
    #[arg(long)]
    pub candidate: Option<String>,
    /// Horizon for the first passage, in units of x^alpha.
    #[arg(long)]
    pub horizon_mult: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub level: Option<String>,
}

/// Flat key=value file; later lines win, '#' starts a comment.
fn load_config(path: &Path) -> Result<HashMap<String, String>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::domain(format!(
                "config line {} is not key=value: '{line}'",
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Settings {
    map: HashMap<String, String>,
}

impl Settings {
    fn new(config: &Option<PathBuf>) -> Result<Settings, Error> {
        let map = match config {
            Some(path) => load_config(path)?,
            None => HashMap::new(),
        };
        Ok(Settings { map })
    }

    /// flag value > config value > default
    fn get<T: std::str::FromStr + Copy>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, Error> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.map.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| Error::domain(format!("config key '{key}': cannot parse '{raw}'"))),
            None => Ok(default),
        }
    }

    fn get_string(&self, flag: &Option<String>, key: &str, default: &str) -> String {
        flag.clone()
            .or_else(|| self.map.get(key).cloned())
            .unwrap_or_else(|| default.to_string())
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

fn scheme_config(
    alpha: f64,
    scheme: &str,
    dt: f64,
    jump_threshold: Option<f64>,
) -> Result<PathConfig, Error> {
    match scheme {
        "grid" => PathConfig::grid(dt),
        "hybrid" => match jump_threshold {
            Some(h) => PathConfig::hybrid(dt, h),
            None => PathConfig::hybrid_default(alpha, dt),
        },
        other => Err(Error::domain(format!("unknown scheme '{other}'"))),
    }
}

/// Entry point behind `main`; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(Error::Domain(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_NUMERIC
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, Error> {
    let workers = match &cli.command {
        Command::SampleStable(a) => a.common.workers,
        Command::SimulateCbss(a) => a.common.workers,
        Command::EstimateTail(a) => a.common.workers,
        Command::SolveBvp(a) => a.common.workers,
        Command::FkCheck(a) => a.common.workers,
        Command::Verify(a) => a.common.workers,
    };
    // config-file workers are honored inside each command; the flag decides
    // the pool here because the pool must exist before any parallel work
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::domain(format!("worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::SampleStable(args) => cmd_sample_stable(args),
        Command::SimulateCbss(args) => cmd_simulate(args),
        Command::EstimateTail(args) => cmd_estimate_tail(args),
        Command::SolveBvp(args) => cmd_solve_bvp(args),
        Command::FkCheck(args) => cmd_fk_check(args),
        Command::Verify(args) => cmd_verify(args),
    })
}

fn cmd_sample_stable(args: SampleStableArgs) -> Result<u8, Error> {
    let cfg = Settings::new(&args.common.config)?;
    let alpha = cfg.get(args.common.alpha, "alpha", 1.0)?;
    let seed = cfg.get(args.common.seed, "seed", 0)?;
    let t = cfg.get(args.t, "t", 1.0)?;
    let n = cfg.get(args.n, "n", 1000)?;
    let format = cfg.get_string(&args.common.format, "format", "csv");
    let params = StableParams::new(alpha)?;
    let mut w = writer(&args.common.out)?;
    if args.path {
        let dt = cfg.get(args.dt, "dt", 0.01)?;
        let scheme = cfg.get_string(&args.scheme, "scheme", "hybrid");
        let path_cfg = scheme_config(alpha, &scheme, dt, args.jump_threshold)?;
        let mut rng = substream(seed, 0);
        let path = simulate_path(&params, &path_cfg, 0.0, t, &mut rng)?;
        writeln!(w, "time,value")?;
        for (time, value) in path.times.iter().zip(&path.values) {
            writeln!(w, "{time:.12e},{value:.12e}")?;
        }
        if let Some(out) = &args.common.out {
            let sidecar = out.with_extension("jumps.csv");
            let mut jw = std::io::BufWriter::new(std::fs::File::create(sidecar)?);
            writeln!(jw, "time,size")?;
            for (time, size) in &path.big_jumps {
                writeln!(jw, "{time:.12e},{size:.12e}")?;
            }
        }
        return Ok(EXIT_OK);
    }
    let mut rng = substream(seed, 0);
    let samples: Vec<f64> = (0..n).map(|_| sample_stable(&params, t, &mut rng).value).collect();
    if format == "json" {
        writeln!(w, "{}", serde_json::to_string(&samples)?)?;
    } else {
        writeln!(w, "t,value")?;
        for v in samples {
            writeln!(w, "{t:.12e},{v:.12e}")?;
        }
    }
    Ok(EXIT_OK)
}

fn cbss_config_from(
    cfg: &Settings,
    alpha: f64,
    seed: u64,
    dt: Option<f64>,
    scheme: &Option<String>,
    jump_threshold: Option<f64>,
    progeny_cap: Option<usize>,
    time_cap: Option<f64>,
    default_time_cap: f64,
) -> Result<CbssConfig, Error> {
    let dt = cfg.get(dt, "dt", 0.02)?;
    let scheme = cfg.get_string(scheme, "scheme", "hybrid");
    let jump_threshold = match jump_threshold {
        Some(h) => Some(h),
        None => cfg.map.get("jump-threshold").map(|s| s.parse()).transpose().map_err(|_| {
            Error::domain("config key 'jump-threshold': cannot parse".to_string())
        })?,
    };
    let path = scheme_config(alpha, &scheme, dt, jump_threshold)?;
    let progeny_cap = cfg.get(progeny_cap, "progeny-cap", 100_000)?;
    let time_cap = cfg.get(time_cap, "time-cap", default_time_cap)?;
    CbssConfig::new(StableParams::new(alpha)?, path, progeny_cap, time_cap, seed)
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, Error> {
    let cfg = Settings::new(&args.common.config)?;
    let alpha = cfg.get(args.common.alpha, "alpha", 1.0)?;
    let seed = cfg.get(args.common.seed, "seed", 0)?;
    let x = cfg.get(args.x, "x", 10.0)?;
    let sim_cfg = cbss_config_from(
        &cfg,
        alpha,
        seed,
        args.dt,
        &args.scheme,
        args.jump_threshold,
        args.progeny_cap,
        args.time_cap,
        8.0 * x.powf(alpha / 2.0),
    )?;
    let mut rng = substream(seed, 0);
    let r = simulate_realization(&sim_cfg, x, &mut rng)?;
    let format = cfg.get_string(&args.common.format, "format", "json");
    let mut w = writer(&args.common.out)?;
    if format == "csv" {
        writeln!(w, "alpha,x,crossed,m_lower,censored,progeny_used,wall_events")?;
        writeln!(
            w,
            "{alpha},{x},{},{:.12e},{},{},{}",
            r.crossed, r.m_lower, r.censored, r.progeny_used, r.wall_events
        )?;
    } else {
        writeln!(
            w,
            "{}",
            serde_json::json!({
                "alpha": alpha,
                "x": x,
                "crossed": r.crossed,
                "m_lower": r.m_lower,
                "censored": r.censored,
                "progeny_used": r.progeny_used,
                "wall_events": r.wall_events,
            })
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_estimate_tail(args: EstimateTailArgs) -> Result<u8, Error> {
    let cfg = Settings::new(&args.common.config)?;
    let alpha = cfg.get(args.common.alpha, "alpha", 1.0)?;
    let seed = cfg.get(args.common.seed, "seed", 0)?;
    let n = cfg.get(args.n, "n", 10_000)?;
    let xs = if args.xs.is_empty() {
        match cfg.map.get("x") {
            Some(raw) => raw
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| Error::domain("config key 'x': cannot parse list"))?,
            None => vec![25.0, 50.0, 100.0, 200.0],
        }
    } else {
        args.xs.clone()
    };
    let x_max = xs.iter().cloned().fold(0.0f64, f64::max);
    let sim_cfg = cbss_config_from(
        &cfg,
        alpha,
        seed,
        args.dt,
        &args.scheme,
        args.jump_threshold,
        args.progeny_cap,
        args.time_cap,
        8.0 * x_max.powf(alpha / 2.0),
    )?;
    let estimates = estimate_tail(&sim_cfg, &xs, n)?;
    let format = cfg.get_string(&args.common.format, "format", "csv");
    let mut w = writer(&args.common.out)?;
    if format == "json" {
        let rows: Vec<serde_json::Value> = estimates
            .iter()
            .map(|e| {
                let theory = crate::tail_theory(alpha, e.x);
                serde_json::json!({
                    "alpha": alpha, "x": e.x, "n": e.n, "hits": e.hits,
                    "censored": e.censored_count, "p_hat": e.p_hat,
                    "ci_low": e.ci_low, "ci_high": e.ci_high,
                    "bracket_high": e.p_hat_bracket_high,
                    "theory": theory, "ratio": e.p_hat / theory,
                })
            })
            .collect();
        writeln!(w, "{}", serde_json::to_string_pretty(&rows)?)?;
    } else {
        writeln!(w, "alpha,x,n,hits,censored,p_hat,ci_low,ci_high,bracket_high,theory,ratio")?;
        for e in &estimates {
            let theory = crate::tail_theory(alpha, e.x);
            writeln!(
                w,
                "{alpha},{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                e.x,
                e.n,
                e.hits,
                e.censored_count,
                e.p_hat,
                e.ci_low,
                e.ci_high,
                e.p_hat_bracket_high,
                theory,
                e.p_hat / theory
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_solve_bvp(args: SolveBvpArgs) -> Result<u8, Error> {
    let cfg = Settings::new(&args.common.config)?;
    let alpha = cfg.get(args.common.alpha, "alpha", 1.0)?;
    let l = cfg.get(args.l, "l", 1e4)?;
    let nodes = cfg.get(args.nodes, "nodes", 480)?;
    let grading = cfg.get_string(&args.grading, "grading", "geometric");
    let first = cfg.get(args.first, "first", 1e-3)?;
    let solver = SolverConfig {
        damping: cfg.get(args.damping, "damping", 1.0)?,
        tol: cfg.get(args.tol, "tol", 1e-8)?,
        max_iters: cfg.get(args.max_iters, "max-iters", 80)?,
        quad_tol: 1e-10,
    };
    let grid = match grading.as_str() {
        "uniform" => Grid::uniform(l, nodes)?,
        "geometric" => Grid::geometric(first, l, nodes)?,
        other => return Err(Error::domain(format!("unknown grading '{other}'"))),
    };
    let stable = StableParams::new(alpha)?;
    let u = crate::bvp::solve_bvp(&stable, &grid, &solver)?;
    let op = FracLaplacianOp::assemble(u.grid(), alpha, solver.quad_tol)?;
    let residuals = op.residual(u.values());
    let format = cfg.get_string(&args.common.format, "format", "csv");
    let mut w = writer(&args.common.out)?;
    if format == "json" {
        let rows: Vec<serde_json::Value> = u
            .grid()
            .nodes()
            .iter()
            .zip(u.values())
            .zip(&residuals)
            .map(|((x, v), r)| {
                serde_json::json!({
                    "x": x, "u": v,
                    "scaled": x.powf(alpha / 2.0) * v,
                    "residual": r,
                })
            })
            .collect();
        writeln!(w, "{}", serde_json::to_string_pretty(&rows)?)?;
    } else {
        writeln!(w, "x,u,scaled_u,residual")?;
        for ((x, v), r) in u.grid().nodes().iter().zip(u.values()).zip(&residuals) {
            writeln!(w, "{x:.12e},{v:.12e},{:.12e},{r:.12e}", x.powf(alpha / 2.0) * v)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_fk_check(args: FkCheckArgs) -> Result<u8, Error> {
    let cfg = Settings::new(&args.common.config)?;
    let alpha = cfg.get(args.common.alpha, "alpha", 1.0)?;
    let seed = cfg.get(args.common.seed, "seed", 0)?;
    let n = cfg.get(args.n, "n", 20_000)?;
    let horizon_mult = cfg.get(args.horizon_mult, "horizon-mult", 50.0)?;
    let dt = cfg.get(args.dt, "dt", 0.05)?;
    let candidate_spec = cfg.get_string(&args.candidate, "candidate", "bvp");
    let xs = if args.xs.is_empty() { vec![25.0, 100.0] } else { args.xs.clone() };
    let stable = StableParams::new(alpha)?;
    let candidate = if candidate_spec == "bvp" {
        let grid = Grid::geometric(1e-3, 1e4, 480)?;
        CandidateU::Grid(crate::bvp::solve_bvp(&stable, &grid, &SolverConfig::default())?)
    } else if let Some(c) = candidate_spec.strip_prefix("ansatz:") {
        let c: f64 = c
            .parse()
            .map_err(|_| Error::domain(format!("bad ansatz coefficient '{c}'")))?;
        CandidateU::Ansatz { c, alpha }
    } else {
        return Err(Error::domain(format!(
            "candidate must be 'bvp' or 'ansatz:<c>', got '{candidate_spec}'"
        )));
    };
    let path_cfg = PathConfig::hybrid(dt, (2.0 * dt / alpha).powf(1.0 / alpha))?;
    let mut w = writer(&args.common.out)?;
    let format = cfg.get_string(&args.common.format, "format", "csv");
    let mut rows = Vec::new();
    for &x in &xs {
        let est = fk_estimate(x, &candidate, &stable, &path_cfg, n, horizon_mult, seed)?;
        let u_val = candidate.eval(x);
        rows.push((x, est, u_val));
    }
    if format == "json" {
        let objs: Vec<serde_json::Value> = rows
            .iter()
            .map(|(x, est, u_val)| {
                serde_json::json!({
                    "x": x, "fk_mean": est.mean, "fk_se": est.std_err,
                    "candidate_u": u_val, "ratio": est.mean / u_val,
                    "censored_count": est.censored_count,
                    "censored_mass": est.censored_mass,
                })
            })
            .collect();
        writeln!(w, "{}", serde_json::to_string_pretty(&objs)?)?;
    } else {
        writeln!(w, "x,fk_mean,fk_se,candidate_u,ratio")?;
        for (x, est, u_val) in &rows {
            writeln!(
                w,
                "{x:.12e},{:.12e},{:.12e},{u_val:.12e},{:.12e}",
                est.mean,
                est.std_err,
                est.mean / u_val
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let cfg = Settings::new(&args.common.config)?;
    let seed = cfg.get(args.common.seed, "seed", 0)?;
    let level_str = cfg.get_string(&args.level, "level", "quick");
    let level: Level = level_str.parse().map_err(Error::Domain)?;
    let report = run_verify(level, seed);
    for c in &report.checks {
        eprintln!(
            "[{}] {:<32} stat {:>12.5e} thr {:>12.5e}  {}",
            if c.passed() { "pass" } else { "FAIL" },
            c.check_id,
            c.statistic,
            c.threshold,
            c.claim
        );
    }
    eprintln!("{} passed, {} failed", report.passed, report.failed);
    let mut w = writer(&args.common.out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

//! Pathwise simulation of the symmetric alpha-stable process with an
//! explicit jump decomposition, plus first-passage machinery and the
//! statistical checks on short-time / overshoot / jump-independence
//! structure that the rest of the crate leans on.
//!
//! Two schemes:
//!
//! * `GridIncrements` — i.i.d. stable increments on a time grid; marginals
//!   at grid times are exact.
//! * `HybridJumpDiffusion` — jumps with `|y| > h` drawn exactly from the
//!   Levy measure as a marked Poisson stream (rate `2 h^-alpha / alpha`),
//!   compensated small jumps approximated by Brownian motion with the
//!   matched variance rate `sigma_h^2 = 2 h^(2-alpha) / (2-alpha)`. The
//!   skeleton includes every jump time.

use crate::stable::{levy_tail_mass, sample_stable, StableParams};
use crate::stats;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Maximum number of skeleton points a materialized path may hold.
pub const MAX_PATH_POINTS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GridIncrements,
    HybridJumpDiffusion,
}

/// Time step, big-jump threshold and scheme for path simulation.
#[derive(Debug, Clone, Copy)]
pub struct PathConfig {
    pub dt: f64,
    pub jump_threshold: f64,
    pub scheme: Scheme,
}

impl PathConfig {
    pub fn grid(dt: f64) -> Result<Self> {
        Self::new(dt, dt, Scheme::GridIncrements)
    }

    pub fn hybrid(dt: f64, jump_threshold: f64) -> Result<Self> {
        Self::new(dt, jump_threshold, Scheme::HybridJumpDiffusion)
    }

    /// Hybrid scheme with the default threshold `h = dt^(1/alpha)`, which
    /// keeps the jump resolution commensurate with the grid and makes the
    /// discretized process exactly self-similar under `(x, t) -> (Ax, A^alpha t)`.
    pub fn hybrid_default(alpha: f64, dt: f64) -> Result<Self> {
        Self::new(dt, dt.powf(1.0 / alpha), Scheme::HybridJumpDiffusion)
    }

    fn new(dt: f64, jump_threshold: f64, scheme: Scheme) -> Result<Self> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::domain(format!("dt must be positive, got {dt}")));
        }
        if jump_threshold <= 0.0 || !jump_threshold.is_finite() {
            return Err(Error::domain(format!(
                "jump threshold must be positive, got {jump_threshold}"
            )));
        }
        Ok(PathConfig { dt, jump_threshold, scheme })
    }
}

/// A simulated trajectory: skeleton points plus the exact big-jump records.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `(time, signed size)` of every jump with `|size| > h` (hybrid scheme).
    pub big_jumps: Vec<(f64, f64)>,
    /// Set when the point cap truncated the path before the horizon.
    pub censored: bool,
}

impl SamplePath {
    pub fn start(&self) -> f64 {
        self.values[0]
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Outcome of a first-passage search.
#[derive(Debug, Clone, Copy)]
pub struct FirstPassageRecord {
    pub tau: f64,
    /// Process value at `tau`; includes the overshoot when the passage was
    /// detected (position of the skeleton at the horizon when censored).
    pub position: f64,
    pub censored: bool,
}

/// Streaming generator of skeleton events for one path.
pub(crate) struct Motion<'r, R: Rng + ?Sized> {
    params: StableParams,
    cfg: PathConfig,
    sigma2: f64,
    jump_rate: f64,
    pub t: f64,
    pub value: f64,
    horizon: f64,
    next_jump_t: f64,
    next_jump_size: f64,
    rng: &'r mut R,
}

/// One skeleton event.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepEvent {
    pub t: f64,
    pub value: f64,
    /// Signed jump size when this event is a big-jump time.
    pub jump: Option<f64>,
}

impl<'r, R: Rng + ?Sized> Motion<'r, R> {
    pub fn new(
        params: &StableParams,
        cfg: &PathConfig,
        start: f64,
        horizon: f64,
        rng: &'r mut R,
    ) -> Motion<'r, R> {
        let alpha = params.alpha();
        let h = cfg.jump_threshold;
        let (sigma2, jump_rate) = match cfg.scheme {
            Scheme::GridIncrements => (0.0, 0.0),
            Scheme::HybridJumpDiffusion => (
                2.0 * h.powf(2.0 - alpha) / (2.0 - alpha),
                2.0 * h.powf(-alpha) / alpha,
            ),
        };
        let mut m = Motion {
            params: *params,
            cfg: *cfg,
            sigma2,
            jump_rate,
            t: 0.0,
            value: start,
            horizon,
            next_jump_t: f64::INFINITY,
            next_jump_size: 0.0,
            rng,
        };
        if m.jump_rate > 0.0 {
            m.schedule_jump();
        }
        m
    }

    fn schedule_jump(&mut self) {
        let wait = -(1.0 - self.rng.random::<f64>()).ln() / self.jump_rate;
        self.next_jump_t = self.t + wait;
        // |Y| has tail (y/h)^(-alpha) on [h, inf); sign is symmetric
        let u: f64 = 1.0 - self.rng.random::<f64>();
        let magnitude = self.cfg.jump_threshold * u.powf(-1.0 / self.params.alpha());
        self.next_jump_size = if self.rng.random::<bool>() { magnitude } else { -magnitude };
    }

    /// Advance to the next skeleton event; `None` once the horizon is reached.
    pub fn next_event(&mut self) -> Option<StepEvent> {
        if self.t >= self.horizon {
            return None;
        }
        match self.cfg.scheme {
            Scheme::GridIncrements => {
                let step = self.cfg.dt.min(self.horizon - self.t);
                self.t += step;
                self.value += sample_stable(&self.params, step, self.rng).value;
                Some(StepEvent { t: self.t, value: self.value, jump: None })
            }
            Scheme::HybridJumpDiffusion => {
                let target = (self.t + self.cfg.dt).min(self.horizon).min(self.next_jump_t);
                let step = target - self.t;
                if step > 0.0 {
                    let z: f64 = StandardNormal.sample(self.rng);
                    self.value += (self.sigma2 * step).sqrt() * z;
                }
                self.t = target;
                let mut jump = None;
                if self.t == self.next_jump_t {
                    self.value += self.next_jump_size;
                    jump = Some(self.next_jump_size);
                    self.schedule_jump();
                }
                Some(StepEvent { t: self.t, value: self.value, jump })
            }
        }
    }
}

/// Simulate a full path over `[0, horizon]`.
pub fn simulate_path<R: Rng + ?Sized>(
    params: &StableParams,
    cfg: &PathConfig,
    start: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<SamplePath> {
    if horizon < 0.0 {
        return Err(Error::domain(format!("horizon must be non-negative, got {horizon}")));
    }
    let mut times = vec![0.0];
    let mut values = vec![start];
    let mut big_jumps = Vec::new();
    let mut censored = false;
    let mut motion = Motion::new(params, cfg, start, horizon, rng);
    while let Some(ev) = motion.next_event() {
        times.push(ev.t);
        values.push(ev.value);
        if let Some(size) = ev.jump {
            big_jumps.push((ev.t, size));
        }
        if times.len() >= MAX_PATH_POINTS {
            censored = true;
            break;
        }
    }
    Ok(SamplePath { times, values, big_jumps, censored })
}

/// First time the skeleton reaches `[a, inf)`, with overshoot.
pub fn first_passage_up<R: Rng + ?Sized>(
    params: &StableParams,
    cfg: &PathConfig,
    start: f64,
    a: f64,
    horizon: f64,
    rng: &mut R,
) -> FirstPassageRecord {
    if start >= a {
        return FirstPassageRecord { tau: 0.0, position: start, censored: false };
    }
    let mut motion = Motion::new(params, cfg, start, horizon, rng);
    while let Some(ev) = motion.next_event() {
        if ev.value >= a {
            return FirstPassageRecord { tau: ev.t, position: ev.value, censored: false };
        }
    }
    FirstPassageRecord { tau: horizon, position: motion.value, censored: true }
}

/// First time the skeleton reaches `(-inf, b]`, with overshoot.
pub fn first_passage_down<R: Rng + ?Sized>(
    params: &StableParams,
    cfg: &PathConfig,
    start: f64,
    b: f64,
    horizon: f64,
    rng: &mut R,
) -> FirstPassageRecord {
    if start <= b {
        return FirstPassageRecord { tau: 0.0, position: start, censored: false };
    }
    let mut motion = Motion::new(params, cfg, start, horizon, rng);
    while let Some(ev) = motion.next_event() {
        if ev.value <= b {
            return FirstPassageRecord { tau: ev.t, position: ev.value, censored: false };
        }
    }
    FirstPassageRecord { tau: horizon, position: motion.value, censored: true }
}

/// Running maximum of the recorded skeleton up to time `t` (a lower bound
/// for the continuous-time supremum).
pub fn running_max(path: &SamplePath, t: f64) -> Result<f64> {
    if t < 0.0 || t > path.last_time() {
        return Err(Error::domain(format!(
            "t = {t} outside the recorded range [0, {}]",
            path.last_time()
        )));
    }
    let mut max = f64::NEG_INFINITY;
    for (time, value) in path.times.iter().zip(&path.values) {
        if *time > t {
            break;
        }
        max = max.max(*value);
    }
    Ok(max)
}

/// Monte Carlo estimate of `P( X_{tau_A} > x | tau_A < eps )` started at 0.
#[derive(Debug, Clone, Copy)]
pub struct OvershootEstimate {
    pub p_hat: f64,
    pub conditioning_events: u64,
    pub exceed: u64,
    pub se: f64,
    /// Set when too few conditioning events landed for a tight interval.
    pub wide_ci: bool,
}

pub fn overshoot_conditional_tail<R: Rng + ?Sized>(
    params: &StableParams,
    a: f64,
    x: f64,
    eps: f64,
    n: u64,
    rng: &mut R,
) -> Result<OvershootEstimate> {
    if !(x > a && a >= 1.0) {
        return Err(Error::domain(format!("need x > a >= 1, got a={a}, x={x}")));
    }
    if eps <= 0.0 {
        return Err(Error::domain("eps must be positive"));
    }
    let cfg = PathConfig::hybrid_default(params.alpha(), eps / 8.0)?;
    let mut events = 0u64;
    let mut exceed = 0u64;
    for _ in 0..n {
        let rec = first_passage_up(params, &cfg, 0.0, a, eps, rng);
        if !rec.censored && rec.tau < eps {
            events += 1;
            if rec.position > x {
                exceed += 1;
            }
        }
    }
    let p_hat = if events == 0 { f64::NAN } else { exceed as f64 / events as f64 };
    let se = if events == 0 { f64::INFINITY } else { stats::binom_se(exceed, events) };
    Ok(OvershootEstimate { p_hat, conditioning_events: events, exceed, se, wide_ci: events < 100 })
}

/// Independence report between the first jump of size in `J = [j_lo, inf)`
/// and a pre-jump path functional (the sign of the skeleton value at half
/// the jump time): a 2x2 chi-square, plus a KS check of the jump-size
/// marginal against the normalized Levy density on `J`.
#[derive(Debug, Clone)]
pub struct JumpIndependenceReport {
    pub events: u64,
    pub table: [[u64; 2]; 2],
    pub chi2: f64,
    pub p_value: f64,
    pub marginal_ks_p: f64,
    pub insufficient: bool,
}

pub fn jump_independence_check<R: Rng + ?Sized>(
    params: &StableParams,
    j_lo: f64,
    n: u64,
    rng: &mut R,
) -> Result<JumpIndependenceReport> {
    if j_lo <= 0.0 {
        return Err(Error::domain("interval must be bounded away from zero"));
    }
    let alpha = params.alpha();
    let rate = levy_tail_mass(params, j_lo)?; // one-sided
    let mean_wait = 1.0 / rate;
    let horizon = 20.0 * mean_wait;
    let dt = 0.01 * mean_wait;
    let cfg = PathConfig::hybrid(dt, dt.powf(1.0 / alpha).min(j_lo / 4.0))?;
    // the jump-size law on J has its median at j_lo 2^(1/alpha)
    let median = j_lo * 2.0_f64.powf(1.0 / alpha);
    let mut table = [[0u64; 2]; 2];
    let mut sizes: Vec<f64> = Vec::new();
    let mut events = 0u64;
    for _ in 0..n {
        let path = simulate_path(params, &cfg, 0.0, horizon, rng)?;
        let hit = path.big_jumps.iter().find(|(_, size)| *size >= j_lo);
        let Some(&(nu, size)) = hit else { continue };
        events += 1;
        let pre = running_value_at(&path, nu / 2.0);
        let row = usize::from(pre < 0.0);
        let col = usize::from(size > median);
        table[row][col] += 1;
        sizes.push(size);
    }
    let (chi2, p_value) = stats::chi2_2x2(table);
    let cdf = |y: f64| {
        if y <= j_lo {
            0.0
        } else {
            1.0 - (y / j_lo).powf(-alpha)
        }
    };
    let (_, marginal_ks_p) = stats::ks_one_sample(&mut sizes, cdf);
    Ok(JumpIndependenceReport {
        events,
        table,
        chi2,
        p_value,
        marginal_ks_p,
        insufficient: events < 200,
    })
}

/// Skeleton value at the last recorded time `<= t`.
fn running_value_at(path: &SamplePath, t: f64) -> f64 {
    match path.times.binary_search_by(|p| p.total_cmp(&t)) {
        Ok(i) => path.values[i],
        Err(i) => path.values[i.saturating_sub(1)],
    }
}

//! The composed particle system: branching skeleton with stable edge
//! motions, maximal-displacement tail estimation and occupation diagnostics.
//!
//! A realization answers one Bernoulli question, "did any particle ever
//! reach `>= x`?". The event is determined the moment the first particle
//! crosses, so the loop exits early on a hit and only non-crossing runs pay
//! the full extinction cost; with infinite expected progeny that early exit
//! plus explicit caps is what keeps the estimator safe. Capped undecided
//! runs are reported as censored and bracketed, never dropped.

use crate::branching::Fate;
use crate::levy_path::{Motion, PathConfig};
use crate::rng::{substream, Stream};
use crate::stable::StableParams;
use crate::stats;
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Full configuration of a CBSS Monte Carlo run.
#[derive(Debug, Clone, Copy)]
pub struct CbssConfig {
    pub stable: StableParams,
    pub path: PathConfig,
    pub progeny_cap: usize,
    pub time_cap: f64,
    pub seed: u64,
}

impl CbssConfig {
    pub fn new(
        stable: StableParams,
        path: PathConfig,
        progeny_cap: usize,
        time_cap: f64,
        seed: u64,
    ) -> Result<Self> {
        if progeny_cap == 0 || time_cap <= 0.0 {
            return Err(Error::domain("caps must be positive"));
        }
        Ok(CbssConfig { stable, path, progeny_cap, time_cap, seed })
    }
}

/// Outcome of a single realization for a fixed threshold `x`.
#[derive(Debug, Clone, Copy)]
pub struct RealizationResult {
    /// Some particle reached `>= x`.
    pub crossed: bool,
    /// Maximum displacement observed on the discrete skeleton (a lower
    /// bound for the true maximum; `>= 0` since the root starts at 0).
    pub m_lower: f64,
    /// The crossing question was left unresolved by a cap.
    pub censored: bool,
    /// Particles materialized before the loop stopped.
    pub progeny_used: usize,
    /// Skeleton events generated (grid steps + jumps).
    pub wall_events: u64,
}

/// Monte Carlo tail estimate at one threshold.
#[derive(Debug, Clone, Copy)]
pub struct TailEstimate {
    pub x: f64,
    pub n: u64,
    pub hits: u64,
    pub censored_count: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Censored runs counted as hits: the upper end of the bracket.
    pub p_hat_bracket_high: f64,
}

impl TailEstimate {
    /// Quality flag: censored runs above 1% of the sample.
    pub fn censor_flagged(&self) -> bool {
        self.censored_count as f64 > 0.01 * self.n as f64
    }
}

#[derive(PartialEq)]
struct Birth(f64, u64, f64); // (birth time, insertion counter, position)

impl Eq for Birth {}
impl PartialOrd for Birth {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Birth {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Run one realization with early exit at the first crossing.
pub fn simulate_realization<R: Rng + ?Sized>(
    cfg: &CbssConfig,
    x: f64,
    rng: &mut R,
) -> Result<RealizationResult> {
    if x <= 0.0 {
        return Err(Error::domain(format!(
            "threshold must be positive (the tail is 1 for x <= 0), got {x}"
        )));
    }
    Ok(run_realization(cfg, x, rng, true, false))
}

/// As [`simulate_realization`] but optionally disabling early exit (the
/// crossing flag must not change) or mirroring space (which estimates the
/// minimal-displacement tail `P{ min <= -x }` of the original process).
pub fn simulate_realization_full<R: Rng + ?Sized>(
    cfg: &CbssConfig,
    x: f64,
    rng: &mut R,
    early_exit: bool,
    mirror: bool,
) -> Result<RealizationResult> {
    if x <= 0.0 {
        return Err(Error::domain("threshold must be positive"));
    }
    Ok(run_realization(cfg, x, rng, early_exit, mirror))
}

fn run_realization<R: Rng + ?Sized>(
    cfg: &CbssConfig,
    x: f64,
    rng: &mut R,
    early_exit: bool,
    mirror: bool,
) -> RealizationResult {
    let sign = if mirror { -1.0 } else { 1.0 };
    let mut queue: BinaryHeap<Reverse<Birth>> = BinaryHeap::new();
    let mut counter = 0u64;
    queue.push(Reverse(Birth(0.0, counter, 0.0)));
    counter += 1;
    let mut crossed = false;
    let mut censored = false;
    let mut m_lower = 0.0f64;
    let mut progeny_used = 0usize;
    let mut wall_events = 0u64;
    while let Some(Reverse(Birth(birth, _, position))) = queue.pop() {
        if birth > cfg.time_cap {
            // birth order: every remaining particle is also unresolved
            censored = true;
            break;
        }
        if progeny_used == cfg.progeny_cap {
            censored = true;
            break;
        }
        progeny_used += 1;
        let lifetime = -(1.0 - rng.random::<f64>()).ln();
        let fate = if rng.random::<bool>() { Fate::Split } else { Fate::Die };
        let death = birth + lifetime;
        let cut = death > cfg.time_cap;
        let horizon = if cut { cfg.time_cap - birth } else { lifetime };
        let mut end_position = position;
        if horizon > 0.0 {
            let mut motion = Motion::new(&cfg.stable, &cfg.path, position, horizon, rng);
            while let Some(ev) = motion.next_event() {
                wall_events += 1;
                let v = sign * ev.value;
                if v > m_lower {
                    m_lower = v;
                }
                if v >= x {
                    crossed = true;
                    if early_exit {
                        return RealizationResult {
                            crossed: true,
                            m_lower,
                            censored: false,
                            progeny_used,
                            wall_events,
                        };
                    }
                }
            }
            end_position = motion.value;
        }
        if cut {
            // death and any offspring lie beyond the horizon
            censored = true;
            continue;
        }
        if fate == Fate::Split {
            queue.push(Reverse(Birth(death, counter, end_position)));
            queue.push(Reverse(Birth(death, counter + 1, end_position)));
            counter += 2;
        }
    }
    if crossed {
        censored = false;
    }
    RealizationResult { crossed, m_lower, censored, progeny_used, wall_events }
}

/// Estimate `P{ M >= x }` at each threshold with `n` independent
/// realizations per point.
///
/// Realization `i` of threshold index `j` draws from substream
/// `j * n + i` of the root seed, so results are bit-identical for any
/// worker count.
pub fn estimate_tail(cfg: &CbssConfig, xs: &[f64], n: u64) -> Result<Vec<TailEstimate>> {
    if n == 0 {
        return Err(Error::domain("need at least one realization"));
    }
    xs.iter()
        .enumerate()
        .map(|(j, &x)| {
            if x <= 0.0 {
                return Err(Error::domain("all thresholds must be positive"));
            }
            let base = j as u64 * n;
            let (hits, censored) = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(cfg.seed, base + i);
                    let r = run_realization(cfg, x, &mut rng, true, false);
                    (u64::from(r.crossed), u64::from(r.censored))
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            Ok(tally(x, n, hits, censored))
        })
        .collect()
}

fn tally(x: f64, n: u64, hits: u64, censored: u64) -> TailEstimate {
    let p_hat = hits as f64 / n as f64;
    let (ci_low, ci_high) = stats::wilson(hits, n);
    TailEstimate {
        x,
        n,
        hits,
        censored_count: censored,
        p_hat,
        ci_low,
        ci_high,
        p_hat_bracket_high: (hits + censored) as f64 / n as f64,
    }
}

/// Occupation estimate: mean number of particles at positions `>= x` at
/// time `t` (all particles when `x` is `None`).
#[derive(Debug, Clone, Copy)]
pub struct OccupationEstimate {
    pub mean: f64,
    pub se: f64,
    pub capped_runs: u64,
}

pub fn occupation_count(
    cfg: &CbssConfig,
    t: f64,
    x: Option<f64>,
    n: u64,
) -> Result<OccupationEstimate> {
    if t <= 0.0 {
        return Err(Error::domain("occupation time must be positive"));
    }
    if t > cfg.time_cap {
        return Err(Error::domain(format!(
            "occupation time {t} beyond the configured time cap {}",
            cfg.time_cap
        )));
    }
    let threshold = x.unwrap_or(f64::NEG_INFINITY);
    let samples: Vec<(f64, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(cfg.seed, i);
            occupation_one(cfg, t, threshold, &mut rng)
        })
        .collect();
    let capped_runs = samples.iter().map(|s| s.1).sum();
    let counts: Vec<f64> = samples.into_iter().map(|s| s.0).collect();
    let (mean, se) = stats::mean_se(&counts);
    Ok(OccupationEstimate { mean, se, capped_runs })
}

fn occupation_one(cfg: &CbssConfig, t: f64, threshold: f64, rng: &mut Stream) -> (f64, u64) {
    let mut queue: BinaryHeap<Reverse<Birth>> = BinaryHeap::new();
    let mut counter = 0u64;
    queue.push(Reverse(Birth(0.0, counter, 0.0)));
    counter += 1;
    let mut count = 0u64;
    let mut progeny_used = 0usize;
    let mut capped = 0u64;
    while let Some(Reverse(Birth(birth, _, position))) = queue.pop() {
        if birth > t {
            break; // born after the observation time: irrelevant
        }
        if progeny_used == cfg.progeny_cap {
            capped = 1;
            break;
        }
        progeny_used += 1;
        let lifetime = -(1.0 - rng.random::<f64>()).ln();
        let fate = if rng.random::<bool>() { Fate::Split } else { Fate::Die };
        let death = birth + lifetime;
        let alive_at_t = death > t;
        let horizon = if alive_at_t { t - birth } else { lifetime };
        let mut end_position = position;
        if horizon > 0.0 {
            let mut motion = Motion::new(&cfg.stable, &cfg.path, position, horizon, rng);
            while motion.next_event().is_some() {}
            end_position = motion.value;
        }
        if alive_at_t {
            if end_position >= threshold {
                count += 1;
            }
        } else if fate == Fate::Split {
            queue.push(Reverse(Birth(death, counter, end_position)));
            queue.push(Reverse(Birth(death, counter + 1, end_position)));
            counter += 2;
        }
    }
    (count as f64, capped)
}

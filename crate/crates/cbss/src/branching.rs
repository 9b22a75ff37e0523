//! The skeletal branching structure: continuous-time binary fission/death at
//! rate 1 with offspring law `p_0 = p_2 = 1/2`, total progeny, population
//! counts, and exact survival formulas.
//!
//! Total progeny is heavy-tailed, `P{xi >= m} ~ sqrt(2/pi) m^(-1/2)`, so the
//! expected tree size is infinite; every sampler here carries explicit
//! progeny and time caps with a `caps_hit` flag, and consumers must treat
//! capped realizations as censored.

use crate::{Error, Result};
use rand::Rng;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    Split,
    Die,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub birth_time: f64,
    /// Exponential(1) lifetime, attached at node creation.
    pub lifetime: f64,
    pub fate: Fate,
}

/// A materialized tree, grown in birth-time order.
#[derive(Debug, Clone)]
pub struct GwTree {
    pub nodes: Vec<TreeNode>,
    /// Number of particles ever born (equals the node count).
    pub progeny: usize,
    /// Largest death time over the materialized leaves; only meaningful
    /// when `caps_hit` is false.
    pub extinction_time: f64,
    pub caps_hit: bool,
    time_cap: f64,
}

/// f64 key ordered through `total_cmp`, for the birth-time heap.
#[derive(PartialEq)]
struct ByBirth(f64, usize, Option<usize>);

impl Eq for ByBirth {}
impl PartialOrd for ByBirth {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByBirth {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Grow a tree breadth-first in birth-time order until extinction or a cap.
///
/// If the next unborn particle's birth time exceeds `time_cap`, or
/// materializing it would push the node count past `progeny_cap`, growth
/// stops with `caps_hit = true`.
pub fn sample_tree<R: Rng + ?Sized>(rng: &mut R, progeny_cap: usize, time_cap: f64) -> GwTree {
    assert!(progeny_cap > 0 && time_cap > 0.0, "caps must be positive");
    let mut queue: BinaryHeap<Reverse<ByBirth>> = BinaryHeap::new();
    let mut next_id = 0usize;
    queue.push(Reverse(ByBirth(0.0, next_id, None)));
    next_id += 1;
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut extinction_time: f64 = 0.0;
    let mut caps_hit = false;
    while let Some(Reverse(ByBirth(birth_time, id, parent))) = queue.pop() {
        if birth_time > time_cap || nodes.len() == progeny_cap {
            caps_hit = true;
            break;
        }
        let lifetime = -(1.0 - rng.random::<f64>()).ln();
        let fate = if rng.random::<bool>() { Fate::Split } else { Fate::Die };
        let death = birth_time + lifetime;
        extinction_time = extinction_time.max(death);
        if fate == Fate::Split {
            queue.push(Reverse(ByBirth(death, next_id, Some(id))));
            queue.push(Reverse(ByBirth(death, next_id + 1, Some(id))));
            next_id += 2;
        }
        nodes.push(TreeNode { id, parent, birth_time, lifetime, fate });
    }
    GwTree { progeny: nodes.len(), nodes, extinction_time, caps_hit, time_cap }
}

/// Total progeny of the embedded discrete double-or-nothing process,
/// without materializing nodes. Returns `(progeny, capped)`.
pub fn sample_progeny<R: Rng + ?Sized>(rng: &mut R, progeny_cap: usize) -> (usize, bool) {
    let mut pending = 1usize;
    let mut progeny = 1usize;
    while pending > 0 {
        pending -= 1;
        if rng.random::<bool>() {
            progeny += 2;
            pending += 2;
            if progeny >= progeny_cap {
                return (progeny, true);
            }
        }
    }
    (progeny, false)
}

/// Exact survival probability `2 / (t + 2)`, the solution of the backward
/// equation `dF/dt = (1 - F)^2 / 2` for the extinction probability `F`.
pub fn survival_prob_exact(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    Ok(2.0 / (t + 2.0))
}

/// `P(xi = 2k+1) = Catalan(k) / 2^(2k+1)`; even total progeny never occurs.
///
/// Evaluated through log-gamma so isolated large `k` stay cheap; see
/// [`progeny_pmf_iter`] for cumulative scans.
pub fn progeny_pmf(k: usize) -> f64 {
    let kf = k as f64;
    (libm::lgamma(2.0 * kf + 1.0)
        - libm::lgamma(kf + 1.0)
        - libm::lgamma(kf + 2.0)
        - (2.0 * kf + 1.0) * std::f64::consts::LN_2)
        .exp()
}

/// Iterator over `P(xi = 2k+1)` for `k = 0, 1, 2, ...` by the exact ratio
/// recurrence `p_{k+1} = p_k (2k+1) / (2(k+2))`.
pub fn progeny_pmf_iter() -> impl Iterator<Item = f64> {
    let mut k = 0usize;
    let mut p = 0.5;
    std::iter::from_fn(move || {
        let current = p;
        p *= (2.0 * k as f64 + 1.0) / (2.0 * (k as f64 + 2.0));
        k += 1;
        Some(current)
    })
}

/// Exact `P(xi >= m)` from partial sums of the progeny law.
pub fn progeny_tail_exact(m: usize) -> f64 {
    if m <= 1 {
        return 1.0;
    }
    // number of odd integers strictly below m
    let k_below = m / 2;
    let below: f64 = progeny_pmf_iter().take(k_below).sum();
    1.0 - below
}

/// Number of particles alive at time `t` (`birth <= t < birth + lifetime`).
pub fn population_at(tree: &GwTree, t: f64) -> Result<usize> {
    if t < 0.0 {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    if tree.caps_hit && t > tree.time_cap {
        return Err(Error::domain(format!(
            "tree was capped at time {}; population at {t} is unresolved",
            tree.time_cap
        )));
    }
    Ok(tree
        .nodes
        .iter()
        .filter(|n| n.birth_time <= t && t < n.birth_time + n.lifetime)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::stats;

    #[test]
    fn schedule_consistency() {
        let mut rng = substream(20, 0);
        for _ in 0..200 {
            let tree = sample_tree(&mut rng, 10_000, 1e9);
            assert_eq!(tree.progeny, tree.nodes.len());
            assert_eq!(tree.nodes[0].birth_time, 0.0);
            let mut children: std::collections::HashMap<usize, usize> = Default::default();
            for n in &tree.nodes {
                if let Some(p) = n.parent {
                    *children.entry(p).or_default() += 1;
                    let parent = tree.nodes.iter().find(|m| m.id == p).unwrap();
                    assert_eq!(n.birth_time, parent.birth_time + parent.lifetime);
                }
            }
            if !tree.caps_hit {
                for n in &tree.nodes {
                    let expect = if n.fate == Fate::Split { 2 } else { 0 };
                    assert_eq!(children.get(&n.id).copied().unwrap_or(0), expect, "node {}", n.id);
                }
                let max_death = tree
                    .nodes
                    .iter()
                    .map(|n| n.birth_time + n.lifetime)
                    .fold(0.0_f64, f64::max);
                assert_eq!(tree.extinction_time, max_death);
            }
            // birth-time order
            assert!(tree.nodes.windows(2).all(|w| w[0].birth_time <= w[1].birth_time));
        }
    }

    #[test]
    fn survival_closed_form() {
        assert_eq!(survival_prob_exact(0.0).unwrap(), 1.0);
        assert_eq!(survival_prob_exact(2.0).unwrap(), 0.5);
        let far = survival_prob_exact(1000.0).unwrap();
        assert!((far - 0.001996).abs() < 1e-6);
        assert!(survival_prob_exact(-0.1).is_err());
    }

    #[test]
    fn pmf_closed_form_and_recurrence_agree() {
        assert!((progeny_pmf(0) - 0.5).abs() < 1e-14);
        assert!((progeny_pmf(1) - 0.125).abs() < 1e-14);
        assert!((progeny_pmf(2) - 0.0625).abs() < 1e-14);
        let from_iter: Vec<f64> = progeny_pmf_iter().take(200).collect();
        for (k, &p) in from_iter.iter().enumerate() {
            assert!(
                (progeny_pmf(k) - p).abs() < 1e-12 * p.max(1e-300),
                "k={k}: {p} vs {}",
                progeny_pmf(k)
            );
        }
    }

    #[test]
    fn pmf_matches_subtree_convolution_oracle() {
        // q_1 = 1/2 and q_n = (1/2) sum_{i+j=n-1} q_i q_j: the root either
        // dies or splits into two independent copies
        let n_max = 31usize;
        let mut q = vec![0.0f64; n_max + 1];
        q[1] = 0.5;
        for n in 2..=n_max {
            let mut conv = 0.0;
            for i in 1..n - 1 {
                conv += q[i] * q[n - 1 - i];
            }
            q[n] = 0.5 * conv;
        }
        for k in 0..=15 {
            let n = 2 * k + 1;
            assert!(
                (q[n] - progeny_pmf(k)).abs() < 1e-13,
                "n={n}: conv {} vs pmf {}",
                q[n],
                progeny_pmf(k)
            );
            if n + 1 <= n_max {
                assert_eq!(q[n + 1], 0.0, "even progeny must be impossible");
            }
        }
    }

    #[test]
    fn pmf_sums_to_one_with_sqrt_tail() {
        let total: f64 = progeny_pmf_iter().take(1_000_000).sum();
        assert!(total > 0.999, "partial sum {total}");
        assert!(total < 1.0);
        // sqrt(m) * P(xi >= m) approaches sqrt(2/pi) ~ 0.7979
        for &m in &[101usize, 1001, 10_001] {
            let tail = progeny_tail_exact(m);
            let scaled = (m as f64).sqrt() * tail;
            assert!((0.6..1.0).contains(&scaled), "m={m}: sqrt(m) tail = {scaled}");
        }
    }

    #[test]
    fn progeny_tail_exact_consistency() {
        assert_eq!(progeny_tail_exact(0), 1.0);
        assert_eq!(progeny_tail_exact(1), 1.0);
        let t2 = progeny_tail_exact(2);
        assert!((t2 - 0.5).abs() < 1e-14); // everything except xi=1
        let t3 = progeny_tail_exact(3);
        assert!((t3 - 0.5).abs() < 1e-14); // xi=2 impossible
        let t4 = progeny_tail_exact(4);
        assert!((t4 - 0.375).abs() < 1e-14); // 1 - 1/2 - 1/8
        let t5 = progeny_tail_exact(5);
        assert!((t5 - 0.375).abs() < 1e-14); // xi=4 impossible
    }

    #[test]
    fn empirical_progeny_and_survival() {
        let mut rng = substream(21, 0);
        let n = 100_000u64;
        let mut xi_counts = [0u64; 3]; // xi = 1, 3, 5
        let mut survive_t2 = 0u64;
        let mut population_t5 = Vec::with_capacity(n as usize);
        // a time cap keeps memory bounded; population queries below the cap
        // stay exact, and a capped tree is never one of progeny 1, 3, 5
        for _ in 0..n {
            let tree = sample_tree(&mut rng, 10_000_000, 25.0);
            if !tree.caps_hit {
                match tree.progeny {
                    1 => xi_counts[0] += 1,
                    3 => xi_counts[1] += 1,
                    5 => xi_counts[2] += 1,
                    _ => {}
                }
            }
            if population_at(&tree, 2.0).unwrap() > 0 {
                survive_t2 += 1;
            }
            population_t5.push(population_at(&tree, 5.0).unwrap() as f64);
        }
        for (i, expect) in [0.5, 0.125, 0.0625].into_iter().enumerate() {
            let p_hat = xi_counts[i] as f64 / n as f64;
            let se = stats::binom_se(xi_counts[i], n);
            assert!((p_hat - expect).abs() < 3.5 * se, "P(xi={}) = {p_hat}", 2 * i + 1);
        }
        let s2 = survive_t2 as f64 / n as f64;
        assert!((s2 - 0.5).abs() < 3.0 * stats::binom_se(survive_t2, n), "survival(2) = {s2}");
        let (mean, se) = stats::mean_se(&population_t5);
        assert!((mean - 1.0).abs() < 3.0 * se, "E Y_5 = {mean} (se {se})");
    }

    #[test]
    fn criticality_and_exact_survival_at_several_times() {
        let mut rng = substream(22, 0);
        let n = 100_000u64;
        let ts = [1.0, 2.0, 10.0, 20.0];
        let mut alive = [0u64; 4];
        let mut populations = vec![Vec::with_capacity(n as usize); 4];
        for _ in 0..n {
            let tree = sample_tree(&mut rng, 10_000_000, 25.0);
            for (i, &t) in ts.iter().enumerate() {
                let pop = population_at(&tree, t).unwrap();
                if pop > 0 {
                    alive[i] += 1;
                }
                populations[i].push(pop as f64);
            }
        }
        for (i, &t) in ts.iter().enumerate() {
            let expect = survival_prob_exact(t).unwrap();
            let p_hat = alive[i] as f64 / n as f64;
            let se = stats::binom_se(alive[i], n);
            assert!(
                (p_hat - expect).abs() < 3.5 * se,
                "t={t}: survival {p_hat} vs exact {expect}"
            );
            let (mean, mse) = stats::mean_se(&populations[i]);
            assert!((mean - 1.0).abs() < 3.5 * mse, "t={t}: E Y_t = {mean} (se {mse})");
        }
    }

    #[test]
    fn progeny_tail_band_monte_carlo() {
        let mut rng = substream(23, 0);
        let n = 300_000u64;
        let ms = [100usize, 1000, 10_000];
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let (progeny, _) = sample_progeny(&mut rng, 10_001);
            for (i, &m) in ms.iter().enumerate() {
                if progeny >= m {
                    counts[i] += 1;
                }
            }
        }
        for (i, &m) in ms.iter().enumerate() {
            let scaled = (m as f64).sqrt() * counts[i] as f64 / n as f64;
            let exact = (m as f64).sqrt() * progeny_tail_exact(m);
            assert!((0.6..1.0).contains(&scaled), "m={m}: sqrt(m) tail = {scaled}");
            let se = (m as f64).sqrt() * stats::binom_se(counts[i], n);
            assert!(
                (scaled - exact).abs() < 3.5 * se,
                "m={m}: {scaled} vs exact {exact} (se {se})"
            );
        }
    }

    #[test]
    fn population_trivial_cases_and_cap_errors() {
        let mut rng = substream(24, 0);
        let tree = sample_tree(&mut rng, 10_000_000, 1e6);
        assert_eq!(population_at(&tree, 0.0).unwrap(), 1);
        assert_eq!(population_at(&tree, tree.extinction_time + 1.0).unwrap(), 0);
        assert!(population_at(&tree, -1.0).is_err());
        // force a cap and query beyond it
        let mut rng = substream(24, 1);
        let capped = loop {
            let t = sample_tree(&mut rng, 50, 1e6);
            if t.caps_hit {
                break t;
            }
        };
        assert!(population_at(&capped, 1e7).is_err());
    }

    #[test]
    fn uncapped_sampling_terminates() {
        // E xi is infinite but every realization is a.s. finite; run a block
        // of count-only walks with the cap disabled
        let mut rng = substream(25, 0);
        for _ in 0..10_000 {
            let (progeny, capped) = sample_progeny(&mut rng, usize::MAX);
            assert!(!capped);
            assert!(progeny % 2 == 1, "total progeny is always odd");
        }
    }
}

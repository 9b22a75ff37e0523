//! Property tests for the structural invariants that should hold for any
//! admissible parameters, not just the spot-checked ones.

use cbss::bvp::{Grid, GridFunction};
use cbss::levy_path::{simulate_path, PathConfig};
use cbss::rng::substream;
use cbss::stable::{stable_tail, StableParams};
use cbss::stats::{isotonic_non_increasing, wilson};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wilson_interval_brackets_the_estimate(hits in 0u64..=500, extra in 0u64..=500) {
        let n = hits + extra;
        prop_assume!(n > 0);
        let (lo, hi) = wilson(hits, n);
        let p = hits as f64 / n as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn isotonic_projection_is_monotone_and_idempotent(
        values in prop::collection::vec(0.0f64..1.0, 1..40)
    ) {
        let w = vec![1.0; values.len()];
        let fit = isotonic_non_increasing(&values, &w);
        prop_assert!(fit.windows(2).all(|p| p[0] >= p[1] - 1e-12));
        let again = isotonic_non_increasing(&fit, &w);
        for (a, b) in fit.iter().zip(&again) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // mean is preserved by the pool-adjacent-violators projection
        let m1: f64 = values.iter().sum::<f64>() / values.len() as f64;
        let m2: f64 = fit.iter().sum::<f64>() / fit.len() as f64;
        prop_assert!((m1 - m2).abs() < 1e-10);
    }

    #[test]
    fn paths_have_strictly_increasing_times_and_recorded_jumps(
        alpha in 0.4f64..1.9,
        dt in 0.01f64..0.2,
        seed in 0u64..1000,
    ) {
        let p = StableParams::new(alpha).unwrap();
        let cfg = PathConfig::hybrid_default(alpha, dt).unwrap();
        let mut rng = substream(seed, 0);
        let path = simulate_path(&p, &cfg, 0.0, 2.0, &mut rng).unwrap();
        prop_assert!(path.times.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(path.times.len(), path.values.len());
        prop_assert_eq!(*path.times.last().unwrap(), 2.0);
        for &(t, size) in &path.big_jumps {
            prop_assert!(t > 0.0 && t <= 2.0);
            prop_assert!(size.abs() > cfg.jump_threshold);
            prop_assert!(path.times.binary_search_by(|q| q.total_cmp(&t)).is_ok());
        }
    }

    #[test]
    fn tail_evaluator_is_a_valid_survival_function(
        alpha in 0.35f64..1.95,
        t in 0.2f64..4.0,
    ) {
        let p = StableParams::new(alpha).unwrap();
        let xs = [-40.0, -5.0, -0.5, 0.0, 0.5, 5.0, 40.0, 400.0];
        let mut prev = 1.0f64;
        for &x in &xs {
            let tail = stable_tail(&p, t, x).unwrap();
            prop_assert!((0.0..=1.0).contains(&tail));
            prop_assert!(tail <= prev + 1e-9, "tail must be non-increasing");
            prev = tail;
        }
        prop_assert!((stable_tail(&p, t, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_function_extension_is_continuous_at_the_cutoff(
        alpha in 0.4f64..1.9,
        l_exp in 1.0f64..4.0,
        n in 16usize..80,
    ) {
        let l = 10f64.powf(l_exp);
        let grid = Grid::geometric(1e-3, l, n).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|&x| (1.0 + x).powf(-alpha / 2.0)).collect();
        let f = GridFunction::new(grid, values, alpha).unwrap();
        prop_assert_eq!(f.eval(-1.0), 1.0);
        let inner = f.eval(l * (1.0 - 1e-10));
        let outer = f.eval(l * (1.0 + 1e-10));
        prop_assert!((inner - outer).abs() < 1e-6 * inner.abs().max(1e-12));
        // far-field decay exponent alpha/2 exactly
        let far = f.eval(8.0 * l) / f.eval(2.0 * l);
        prop_assert!((far - 4.0f64.powf(-alpha / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn progeny_pmf_routes_agree(k in 0usize..3000) {
        let direct = cbss::branching::progeny_pmf(k);
        let via_iter = cbss::branching::progeny_pmf_iter().nth(k).unwrap();
        // the log-gamma route carries ~|lgamma| * eps of rounding, so for
        // k ~ 3000 a few e-11 of relative error is expected
        prop_assert!((direct - via_iter).abs() <= 1e-9 * via_iter.max(1e-300));
    }
}

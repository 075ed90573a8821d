use proptest::prelude::*;

use cubeprogress::cayley::build_distance_table;
use cubeprogress::cube::CubeSpec;
use cubeprogress::walk::{expected_fpt, simulate_cayley_walk, simulate_chain, WalkParams, DEFAULT_STEP_CAP};

/// Exact mean hitting time of 0 from `r0` on the reflecting chain: with
/// `h_k` the expected time to get from `k` to `k - 1`, `h_G = 1` and
/// `h_k = (1 + q h_{k+1}) / p`.
fn hitting_time(p: f64, r0: u32, g: u32) -> f64 {
    let q = 1.0 - p;
    let mut h = vec![0.0; g as usize + 1];
    h[g as usize] = 1.0;
    for k in (1..g as usize).rev() {
        h[k] = (1.0 + q * h[k + 1]) / p;
    }
    h[1..=r0 as usize].iter().sum()
}

fn chain(p_f: f64, r0: u32, diameter: u32, trials: usize, seed: u64) -> cubeprogress::walk::WalkOutcome<f64> {
    simulate_chain(&WalkParams { p_f, r0, diameter, trials, seed }, DEFAULT_STEP_CAP).unwrap()
}

#[test]
fn recurrence_oracle() {
    assert!((hitting_time(1.0, 20, 100) - 20.0).abs() < 1e-12);
    assert!((hitting_time(0.75, 20, 100) - 40.0).abs() < 1e-6);
    for &(p, r0, g) in &[(0.55, 20, 20), (0.6, 10, 30), (0.75, 20, 100), (0.9, 5, 8), (0.55, 20, 200)] {
        let out = chain(p, r0, g, 40_000, 17);
        let exact = hitting_time(p, r0, g);
        let se = out.std_steps / (out.trials as f64).sqrt();
        assert!((out.mean_steps - exact).abs() < 4.0 * se + 1e-9, "p={p} r0={r0} G={g}: {} vs {exact}", out.mean_steps);
    }
}

#[test]
fn near_half_is_finite_and_wall_shortens_it() {
    let near = chain(0.55, 20, 20, 10_000, 4);
    let far = chain(0.55, 20, 200, 10_000, 4);
    assert_eq!(near.truncated, 0);
    assert!(near.mean_steps.is_finite());
    assert!(near.mean_steps < far.mean_steps);
    assert!((expected_fpt(20.0f64, 0.55).unwrap() - 200.0).abs() < 1e-9);
}

#[test]
fn expected_fpt_limits() {
    assert_eq!(expected_fpt(20.0f64, 1.0).unwrap(), 20.0);
    assert!((expected_fpt(20.0f64, 0.75).unwrap() - 40.0).abs() < 1e-12);
    assert!(expected_fpt(20.0f64, 0.5).is_err());
    assert!(expected_fpt(20.0f32, 0.75).unwrap() > 39.99);
}

#[test]
fn paired_seeds_are_monotone() {
    let means: Vec<f64> =
        [0.55, 0.65, 0.75, 0.85, 0.95].iter().map(|&p| chain(p, 20, 100, 5000, 8).mean_steps).collect();
    assert!(means.windows(2).all(|w| w[1] <= w[0]), "{means:?}");
}

#[test]
fn deterministic_and_order_free() {
    let a = chain(0.7, 15, 60, 3000, 99);
    let b = chain(0.7, 15, 60, 3000, 99);
    assert_eq!(a, b);
    let c = chain(0.7, 15, 60, 3000, 100);
    assert_ne!(a.histogram, c.histogram);
}

#[test]
fn truncation_counts_at_cap() {
    let out = simulate_chain(&WalkParams { p_f: 0.51, r0: 50, diameter: 1000, trials: 200, seed: 1 }, 60).unwrap();
    assert_eq!(out.truncated, 200);
    assert_eq!(out.mean_steps, 60.0);
}

#[test]
fn invalid_parameters() {
    let bad = |p_f: f64, r0: u32, diameter: u32, trials: usize| {
        simulate_chain(&WalkParams { p_f, r0, diameter, trials, seed: 0 }, 100).is_err()
    };
    assert!(bad(0.0, 5, 10, 10));
    assert!(bad(1.2, 5, 10, 10));
    assert!(bad(0.7, 11, 10, 10));
    assert!(bad(0.7, 5, 10, 0));
}

#[test]
fn cayley_walk_on_the_2_cube() {
    let table = build_distance_table(CubeSpec::htm(2).unwrap()).unwrap();
    let sure = simulate_cayley_walk::<f64>(1.0, 20_000, 3, &table, DEFAULT_STEP_CAP).unwrap();
    assert_eq!(sure.mean_steps, sure.mean_start);
    assert!((sure.mean_start - table.mean_distance()).abs() < 0.05);

    let fast = simulate_cayley_walk::<f64>(0.9, 20_000, 3, &table, DEFAULT_STEP_CAP).unwrap();
    let predicted = expected_fpt(fast.mean_start, 0.9).unwrap();
    assert!(((fast.mean_steps - predicted) / predicted).abs() < 0.15, "{} vs {predicted}", fast.mean_steps);

    let slow = simulate_cayley_walk::<f64>(0.5, 2_000, 3, &table, DEFAULT_STEP_CAP).unwrap();
    assert!(slow.mean_steps > 3.0 * fast.mean_steps);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn steps_have_the_parity_and_floor_of_r0(p in 0.55f64..1.0, r0 in 1u32..30, extra in 0u32..40, seed in any::<u64>()) {
        let out = chain(p, r0, r0 + extra, 200, seed);
        for &steps in out.histogram.keys() {
            prop_assert!(steps >= r0 as u64);
            prop_assert_eq!((steps - r0 as u64) % 2, 0);
        }
        prop_assert_eq!(out.histogram.values().sum::<u64>(), 200);
    }
}

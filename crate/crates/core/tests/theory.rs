mod common;

use proptest::prelude::*;

use unioncs::sets::support_windows;
use unioncs::theory::{
    min_measurements, p1_bound, p2_bound, tangent_cone_distance, uniqueness_lower_bound, width_difference_cones,
    width_support_union, width_tangent_cone,
};
use unioncs::{expected_gauss_norm, ConvexSetDescriptor, Execution};

const SAMPLES: usize = 8192;

fn window(start: usize, width: usize) -> ConvexSetDescriptor {
    ConvexSetDescriptor::SupportWindow { start, width }
}

#[test]
fn single_window_width_matches_gauss_norm() {
    // width 3 covers four coordinates
    let est = width_support_union(&[window(5, 3)], 20, 20_000, 3, Execution::Parallel).unwrap();
    let want = expected_gauss_norm(4).unwrap();
    assert!((est.mean - want).abs() <= 4.0 * est.std_error, "{est:?} vs {want}");
}

#[test]
fn union_width_is_monotone_in_the_window_list() {
    let n = 40;
    let all = support_windows(n, 4).unwrap();
    let mut prev = 0.0;
    for count in [1, 4, 12, all.len()] {
        // shared seed and ambient dimension give common random numbers
        let est = width_support_union(&all[..count], n, SAMPLES, 9, Execution::Parallel).unwrap();
        assert!(est.mean >= prev - 1e-12, "{count}: {} < {prev}", est.mean);
        prev = est.mean;
    }
    let full = width_support_union(&[window(1, n - 1)], n, SAMPLES, 9, Execution::Parallel).unwrap();
    assert!(prev <= full.mean + 1e-12);
}

#[test]
fn nested_windows_do_not_change_union_width() {
    let n = 30;
    let outer = window(4, 10);
    let a = width_support_union(&[outer.clone()], n, SAMPLES, 5, Execution::Sequential).unwrap();
    let b = width_support_union(&[outer, window(6, 2), window(9, 5)], n, SAMPLES, 5, Execution::Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn pair_widths_cover_every_pair_and_merge_overlaps() {
    let n = 24;
    let ws = vec![window(1, 3), window(3, 3), window(15, 3)];
    let pairs = width_difference_cones(&ws, n, SAMPLES, 2, Execution::Parallel).unwrap();
    assert_eq!(pairs.len(), 6);
    let find = |i, j| pairs.iter().find(|p| p.i == i && p.j == j).unwrap().estimate.mean;
    // overlapping windows 1..=4 and 3..=6 merge into six coordinates
    let merged = expected_gauss_norm(6).unwrap();
    assert!((find(0, 1) - merged).abs() < 0.1, "{} vs {merged}", find(0, 1));
    let disjoint = expected_gauss_norm(8).unwrap();
    assert!((find(0, 2) - disjoint).abs() < 0.1, "{} vs {disjoint}", find(0, 2));
    assert!((find(2, 2) - expected_gauss_norm(4).unwrap()).abs() < 0.1);
}

#[test]
fn parallel_and_sequential_estimates_are_identical() {
    let ws = support_windows(32, 5).unwrap();
    let seq = width_difference_cones(&ws, 32, 3000, 17, Execution::Sequential).unwrap();
    let par = width_difference_cones(&ws, 32, 3000, 17, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    let x: Vec<f64> = (0..16).map(|j| if j % 5 == 0 { 1.0 } else { 0.0 }).collect();
    assert_eq!(
        width_tangent_cone(&x, 3000, 4, Execution::Sequential).unwrap(),
        width_tangent_cone(&x, 3000, 4, Execution::Parallel).unwrap()
    );
}

#[test]
fn one_dimensional_tangent_cone_is_a_half_line() {
    // the cone is (-inf, 0] for x = 1, so the width is E[max(g, 0)] = 1/sqrt(2 pi)
    let est = width_tangent_cone(&[1.0], 20_000, 6, Execution::Parallel).unwrap();
    let want = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!((est.mean - want).abs() <= 4.0 * est.std_error, "{est:?} vs {want}");
}

#[test]
fn tangent_width_sits_between_sparse_and_full_norms() {
    let (n, k) = (256, 8);
    let x: Vec<f64> = (0..n).map(|j| if j < k { 1.0 } else { 0.0 }).collect();
    let est = width_tangent_cone(&x, 2048, 8, Execution::Parallel).unwrap();
    let lo = expected_gauss_norm(k as u64).unwrap();
    let hi = expected_gauss_norm(n as u64).unwrap();
    assert!(est.mean > lo && est.mean < hi, "{} not in ({lo}, {hi})", est.mean);
}

#[test]
fn invalid_width_inputs_are_rejected() {
    assert!(width_tangent_cone(&[0.0, 0.0], SAMPLES, 1, Execution::Sequential).is_err());
    assert!(width_tangent_cone(&[f64::NAN], SAMPLES, 1, Execution::Sequential).is_err());
    assert!(width_support_union(&[window(3, 5)], 6, SAMPLES, 1, Execution::Sequential).is_err());
    assert!(width_support_union(&[window(1, 1)], 6, 10, 1, Execution::Sequential).is_err());
}

#[test]
fn report_serializes_with_conventional_keys() {
    let r = uniqueness_lower_bound(100, 3.0, &[4.0, 5.0], 0.25).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["M", "a_M", "omega_t", "omega_Cij", "epsilon", "p1_bound", "p2_bound", "pr_E_lower"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(uniqueness_lower_bound(0, 3.0, &[4.0], 0.25).is_err());
    assert!(p2_bound(10.0, &[1.0], 0.5).is_err());
}

#[test]
fn min_measurements_grows_with_target() {
    let omega_t = 6.0;
    let pairs = vec![4.0; 10];
    let mut prev = 0;
    for target in [0.1, 0.5, 0.9, 0.99, 0.999] {
        let m = min_measurements(omega_t, &pairs, 0.25, target).unwrap();
        assert!(m.constrained <= m.unconstrained);
        assert!(m.constrained >= prev);
        prev = m.constrained;
        let r = uniqueness_lower_bound(m.constrained, omega_t, &pairs, 0.25).unwrap();
        assert!(r.pr_e_lower >= target);
        if m.constrained > 1 {
            let below = uniqueness_lower_bound(m.constrained - 1, omega_t, &pairs, 0.25).unwrap();
            assert!(below.pr_e_lower < target);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn p1_is_a_probability_and_decreasing(omega in 0.0f64..50.0, a in 0.0f64..100.0, da in 0.0f64..10.0) {
        let lo = p1_bound(a + da, omega);
        let hi = p1_bound(a, omega);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(lo <= hi);
    }

    #[test]
    fn p2_never_beats_its_first_term(
        a in 1.0f64..200.0,
        eps in 0.01f64..0.49,
        pairs in prop::collection::vec(0.0f64..20.0, 1..8),
    ) {
        let p = p2_bound(a, &pairs, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(p >= (1.5 * (-eps * eps * a * a / 2.0).exp()).min(1.0) - 1e-15);
    }

    #[test]
    fn tangent_distance_is_invariant_to_joint_sign_flips(
        seed in 0u64..1000,
        flips in prop::collection::vec(any::<bool>(), 6),
    ) {
        let mut r = common::rng(seed);
        let g = common::gaussian_vec(&mut r, 6);
        let x = common::uniform_vec(&mut r, 6, -1.0, 1.0);
        let (g2, x2): (Vec<f64>, Vec<f64>) = g
            .iter()
            .zip(&x)
            .zip(&flips)
            .map(|((gj, xj), f)| if *f { (-gj, -xj) } else { (*gj, *xj) })
            .unzip();
        let d1 = tangent_cone_distance(&g, &x);
        let d2 = tangent_cone_distance(&g2, &x2);
        prop_assert!((d1 - d2).abs() <= 1e-9 * (1.0 + d1));
        prop_assert!(d1 >= 0.0 && d1 <= g.iter().map(|v| v * v).sum::<f64>().sqrt() + 1e-12);
    }
}

mod common;

use proptest::prelude::*;

use common::{grid_prox, simplex_by_enumeration};
use unioncs::solver::mw_update_p;
use unioncs::{project_simplex, soft_threshold, SimplexPoint};

#[test]
fn soft_threshold_matches_grid_search() {
    let mut r = common::rng(5);
    for _ in 0..20 {
        let v = common::uniform_vec(&mut r, 3, -2.0, 2.0);
        let got = soft_threshold(&v, 0.7).unwrap();
        let want = grid_prox(&v, 0.7, 1e-3);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-3, "{got:?} vs {want:?}");
        }
    }
}

#[test]
fn soft_threshold_rejects_negative_threshold() {
    assert!(soft_threshold(&[1.0], -0.1).unwrap_err().is_invalid_argument());
}

#[test]
fn simplex_projection_known_values() {
    let p = project_simplex(&[0.5, 0.5, 0.5]).unwrap();
    for w in p.weights() {
        assert!((w - 1.0 / 3.0).abs() < 1e-15);
    }
    let p = project_simplex(&[2.0, 0.0]).unwrap();
    assert_eq!(p.weights(), &[1.0, 0.0]);
    assert!(project_simplex(&[]).is_err());
    assert!(project_simplex(&[f64::NAN]).is_err());
}

proptest! {
    #[test]
    fn soft_threshold_is_nonexpansive(
        a in prop::collection::vec(-10.0f64..10.0, 1..8),
        shift in prop::collection::vec(-10.0f64..10.0, 8),
        tau in 0.0f64..5.0,
    ) {
        let b: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + s).collect();
        let pa = soft_threshold(&a, tau).unwrap();
        let pb = soft_threshold(&b, tau).unwrap();
        for ((x, y), (u, v)) in pa.iter().zip(&pb).zip(a.iter().zip(&b)) {
            prop_assert!((x - y).abs() <= (u - v).abs() + 1e-12);
        }
    }

    #[test]
    fn soft_threshold_shrinks_toward_zero(v in prop::collection::vec(-10.0f64..10.0, 1..8), tau in 0.0f64..5.0) {
        let z = soft_threshold(&v, tau).unwrap();
        for (zi, vi) in z.iter().zip(&v) {
            prop_assert!(zi.abs() <= vi.abs());
            prop_assert!(zi * vi >= 0.0);
            prop_assert!((vi - zi).abs() <= tau + 1e-12);
        }
    }

    #[test]
    fn simplex_projection_matches_enumeration(v in prop::collection::vec(-3.0f64..3.0, 1..7)) {
        let got = project_simplex(&v).unwrap();
        let want = simplex_by_enumeration(&v);
        for (g, w) in got.weights().iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-9);
        }
    }

    #[test]
    fn simplex_projection_is_idempotent(v in prop::collection::vec(-3.0f64..3.0, 1..10)) {
        let p = project_simplex(&v).unwrap();
        let q = project_simplex(p.weights()).unwrap();
        for (a, b) in p.weights().iter().zip(q.weights()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn mw_stays_on_simplex_and_ignores_shifts(
        raw in prop::collection::vec(0.01f64..1.0, 1..10),
        f in prop::collection::vec(-1e3f64..1e3, 10),
        eta in 0.0f64..5.0,
        c in -1e3f64..1e3,
    ) {
        let total: f64 = raw.iter().sum();
        let p = SimplexPoint::new(raw.iter().map(|w| w / total).collect()).unwrap();
        let f = &f[..raw.len()];
        let next = mw_update_p(&p, f, eta).unwrap();
        prop_assert!((next.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(next.weights().iter().all(|w| *w > 0.0));
        let shifted: Vec<f64> = f.iter().map(|v| v + c).collect();
        let other = mw_update_p(&p, &shifted, eta).unwrap();
        for (a, b) in next.weights().iter().zip(other.weights()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn mw_moves_weight_toward_smaller_loss(eta in 0.01f64..3.0, gap in 0.01f64..10.0) {
        let p = SimplexPoint::uniform(2).unwrap();
        let next = mw_update_p(&p, &[0.0, gap], eta).unwrap();
        prop_assert!(next.weights()[0] > next.weights()[1]);
    }
}

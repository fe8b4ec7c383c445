mod common;

use proptest::prelude::*;

use unioncs::harness::{
    binomial_std, convergence_study, first_reaching, generate_problem, loglog_slope, phase_transition, relative_error,
    run_trial, write_convergence_csv, write_phase_csv, write_trials_csv, Assertion, ExperimentSpec, ScheduleSpec,
    SetFamily, Variant,
};
use unioncs::sets::contains;
use unioncs::solver::PSchedule;
use unioncs::{ConvexSetDescriptor, Execution, SolverConfig};

fn spec(family: SetFamily) -> ExperimentSpec {
    ExperimentSpec {
        n: 12,
        k: 2,
        m_grid: vec![4, 8],
        set_family: family,
        trials: 3,
        solver: SolverConfig::new(10.0, 0.01, 2.0, 200),
        success_tol: 1e-2,
        seed: 5,
        baseline: true,
        noise_std: 0.0,
        assertions: vec![],
    }
}

#[test]
fn generation_is_deterministic_and_nested_in_m() {
    let s = spec(SetFamily::Windows);
    let small = generate_problem(&s, 1, 4).unwrap();
    let again = generate_problem(&s, 1, 4).unwrap();
    assert_eq!(small, again);
    let large = generate_problem(&s, 1, 8).unwrap();
    assert_eq!(small.x_true, large.x_true);
    assert_eq!(small.true_set, large.true_set);
    for i in 0..4 {
        for j in 0..12 {
            assert_eq!(small.problem.a.get(i, j), large.problem.a.get(i, j));
        }
    }
    let other = generate_problem(&s, 2, 4).unwrap();
    assert_ne!(small.x_true, other.x_true);
}

#[test]
fn window_signals_are_unit_norm_and_lie_in_their_set() {
    let s = spec(SetFamily::Windows);
    for trial in 0..20 {
        let g = generate_problem(&s, trial, 4).unwrap();
        let norm = g.x_true.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(contains(&g.problem.sets[g.true_set], &g.x_true, 1e-12).unwrap());
        assert_eq!(g.problem.sets.len(), s.n - s.k);
        // y = A x exactly in the noiseless case
        let ax = g.problem.a.mul_vec(&g.x_true).unwrap();
        assert_eq!(&ax[..], &g.problem.y[..]);
    }
}

#[test]
fn noise_perturbs_only_measurements() {
    let clean = spec(SetFamily::Windows);
    let noisy = ExperimentSpec { noise_std: 0.1, ..clean.clone() };
    let a = generate_problem(&clean, 0, 8).unwrap();
    let b = generate_problem(&noisy, 0, 8).unwrap();
    assert_eq!(a.x_true, b.x_true);
    assert_eq!(a.problem.a, b.problem.a);
    assert_ne!(a.problem.y, b.problem.y);
}

#[test]
fn quantized_and_phase_families_contain_the_truth() {
    let q = generate_problem(&spec(SetFamily::Quantized { bits: 3, range: 2.0 }), 0, 4).unwrap();
    assert_eq!(q.problem.sets.len(), 1);
    assert!(contains(&q.problem.sets[0], &q.x_true, 1e-9).unwrap());

    let p = generate_problem(&spec(SetFamily::PhaseBranches), 0, 4).unwrap();
    assert_eq!(p.problem.sets.len(), 16);
    assert!(contains(&p.problem.sets[p.true_set], &p.x_true, 1e-9).unwrap());

    let too_many = ExperimentSpec { m_grid: vec![11], ..spec(SetFamily::PhaseBranches) };
    assert!(generate_problem(&too_many, 0, 11).is_err());
}

#[test]
fn custom_family_projects_onto_a_listed_set() {
    let sets = vec![
        ConvexSetDescriptor::Ball { center: unioncs::Vector::new(vec![3.0; 12]).unwrap(), radius: 0.5 },
        ConvexSetDescriptor::SupportWindow { start: 1, width: 1 },
    ];
    let s = spec(SetFamily::Custom { path: None, sets: sets.clone() });
    for trial in 0..6 {
        let g = generate_problem(&s, trial, 4).unwrap();
        assert!(contains(&sets[g.true_set], &g.x_true, 1e-9).unwrap());
    }
    assert!(generate_problem(&spec(SetFamily::Custom { path: None, sets: vec![] }), 0, 4).is_err());
}

#[test]
fn invalid_specs_are_rejected() {
    let ok = spec(SetFamily::Windows);
    for bad in [
        ExperimentSpec { k: 12, ..ok.clone() },
        ExperimentSpec { k: 0, ..ok.clone() },
        ExperimentSpec { trials: 0, ..ok.clone() },
        ExperimentSpec { m_grid: vec![], ..ok.clone() },
        ExperimentSpec { m_grid: vec![0], ..ok.clone() },
        ExperimentSpec { success_tol: 0.0, ..ok.clone() },
        ExperimentSpec { noise_std: -1.0, ..ok.clone() },
    ] {
        assert!(bad.validate().is_err(), "{bad:?}");
        assert!(phase_transition(&bad, Execution::Sequential).is_err());
    }
}

#[test]
fn trial_records_agree_with_relative_error() {
    let s = spec(SetFamily::Windows);
    let rec = run_trial(&s, 0, 8, Variant::Constrained);
    assert!(rec.error.is_none());
    assert_eq!(rec.iterations_run, 200);
    assert_eq!(rec.success, rec.rel_error <= s.success_tol);
    let base = run_trial(&s, 0, 8, Variant::Baseline);
    assert_eq!(base.true_set, Some(0));
    assert_eq!(base.chosen_set, Some(0));
}

#[test]
fn phase_table_is_order_independent_and_writes_stable_csv() {
    let mut s = spec(SetFamily::Windows);
    s.assertions = vec![Assertion::MinSuccessRate { m: 99, rate: 0.0 }, Assertion::MinSuccessRate { m: 8, rate: 0.0 }];
    let seq = phase_transition(&s, Execution::Sequential).unwrap();
    let par = phase_transition(&s, Execution::Parallel).unwrap();
    assert_eq!(seq.rows.len(), 2);
    assert_eq!(seq.records.len(), 6);
    assert_eq!(seq.baseline_records.len(), 6);
    assert!(!seq.assertions[0].passed);
    assert!(seq.assertions[1].passed);

    let csv = |pt: &unioncs::harness::PhaseTransition| {
        let mut out = Vec::new();
        write_trials_csv(&pt.records, &mut out).unwrap();
        write_phase_csv(&pt.rows, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    };
    let text = csv(&seq);
    assert_eq!(text, csv(&par));
    assert!(text.starts_with("trial_id,M,seed_used,rel_error,success,chosen_set,true_set,iterations_run\n"));
    for row in &seq.rows {
        let ours: Vec<_> = seq.records.iter().filter(|r| r.m == row.m).collect();
        let rate = ours.iter().filter(|r| r.success).count() as f64 / ours.len() as f64;
        assert_eq!(row.success_rate, rate);
    }
}

#[test]
fn savings_and_dominance_assertions() {
    let mut s = spec(SetFamily::Windows);
    s.baseline = false;
    s.trials = 1;
    s.m_grid = vec![4];
    s.assertions = vec![Assertion::DominatesBaseline, Assertion::Savings { rate: 0.0 }];
    let pt = phase_transition(&s, Execution::Sequential).unwrap();
    // without baseline runs neither comparison can pass
    assert!(pt.assertions.iter().all(|a| !a.passed));
    assert!(!pt.all_assertions_pass());
}

#[test]
fn first_reaching_scans_in_grid_order() {
    let s = ExperimentSpec { trials: 2, ..spec(SetFamily::Windows) };
    let pt = phase_transition(&s, Execution::Sequential).unwrap();
    assert_eq!(first_reaching(&pt.rows, 0.0, false), Some(4));
    assert_eq!(first_reaching(&pt.rows, 0.0, true), Some(4));
    assert_eq!(first_reaching(&pt.rows, 1.1, false), None);
    assert_eq!(binomial_std(0.5, 100), 0.05);
}

#[test]
fn convergence_study_reports_every_horizon() {
    let s = spec(SetFamily::Windows);
    let schedules = [
        ScheduleSpec { schedule: PSchedule::FixedHorizon, lambda3: 0.0 },
        ScheduleSpec { schedule: PSchedule::InverseT, lambda3: 1.0 },
    ];
    let horizons = [16, 32, 64];
    let series = convergence_study(&s, &schedules, &horizons, Execution::Parallel).unwrap();
    assert_eq!(series.len(), 2);
    for sr in &series {
        assert_eq!(sr.points.iter().map(|p| p.horizon).collect::<Vec<_>>(), horizons);
        assert!(sr.points.iter().all(|p| p.certificates.holds()));
        assert!(sr.step_energy_slope.is_finite());
    }
    let mut out = Vec::new();
    write_convergence_csv(&series, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1 + 6);
    assert!(convergence_study(&s, &[], &horizons, Execution::Parallel).is_err());
}

#[test]
fn spec_json_accepts_uppercase_aliases() {
    let s: ExperimentSpec = serde_json::from_str(
        r#"{"N": 12, "K": 2, "M_grid": [4], "trials": 1,
            "solver": {"lambda1": 1, "lambda2": 0.1, "radius": 2, "horizon": 10},
            "set_family": {"quantized": {"bits": 2, "range": 1.0}},
            "assertions": [{"kind": "savings", "rate": 0.9}]}"#,
    )
    .unwrap();
    assert_eq!(s.n, 12);
    assert!(s.baseline);
    assert_eq!(s.success_tol, 1e-3);
    assert_eq!(s.set_family, SetFamily::Quantized { bits: 2, range: 1.0 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loglog_slope_recovers_power_laws(c in 0.01f64..100.0, k in -3.0f64..3.0) {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 5.0, 10.0, 100.0].iter().map(|x| (*x, c * x.powf(k))).collect();
        prop_assert!((loglog_slope(&pts) - k).abs() < 1e-9);
    }

    #[test]
    fn relative_error_is_scale_invariant(seed in 0u64..1000, scale in 0.01f64..100.0) {
        let mut r = common::rng(seed);
        let x = common::gaussian_vec(&mut r, 5);
        let t = common::gaussian_vec(&mut r, 5);
        let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let ts: Vec<f64> = t.iter().map(|v| v * scale).collect();
        let a = relative_error(&x, &t);
        prop_assert!((a - relative_error(&xs, &ts)).abs() <= 1e-12 * (1.0 + a));
        prop_assert_eq!(relative_error(&t, &t), 0.0);
    }
}

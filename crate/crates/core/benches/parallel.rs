//! Sequential against rayon-parallel execution for the two data-parallel
//! workloads: Monte Carlo width estimation and recovery trials.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use unioncs::harness::{phase_transition, ExperimentSpec, SetFamily};
use unioncs::sets::support_windows;
use unioncs::theory::width_difference_cones;
use unioncs::{Execution, SolverConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn widths(c: &mut Criterion) {
    let windows = support_windows(64, 8).unwrap();
    let mut group = c.benchmark_group("width_difference_cones");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| width_difference_cones(&windows, 64, 8192, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn trials(c: &mut Criterion) {
    let mut solver = SolverConfig::new(1000.0, 1e-3, 2.0, 2000);
    solver.penalty_scale = Some(1e5);
    solver.eta_p_scale = 1e4;
    let spec = ExperimentSpec {
        n: 64,
        k: 4,
        m_grid: vec![16, 24],
        set_family: SetFamily::Windows,
        trials: 8,
        solver,
        success_tol: 1e-2,
        seed: 7,
        baseline: true,
        noise_std: 0.0,
        assertions: vec![],
    };
    let mut group = c.benchmark_group("phase_transition");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| phase_transition(&spec, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, widths, trials);
criterion_main!(benches);

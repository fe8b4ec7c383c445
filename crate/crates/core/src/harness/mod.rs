//! Seeded recovery experiments: instance generation, trials against a
//! whole-space baseline, phase-transition tables and convergence studies.

mod convergence;
mod generate;
mod spec;
mod trials;

pub use convergence::{
    convergence_study, loglog_slope, write_convergence_csv, ConvergencePoint, ConvergenceSeries, ScheduleSpec,
    DEFAULT_HORIZONS,
};
pub use generate::{baseline_problem, generate_problem, relative_error, Generated};
pub use spec::{Assertion, ExperimentSpec, SetFamily};
pub use trials::{
    binomial_std, first_reaching, phase_transition, run_trial, write_phase_csv, write_timings_csv,
    write_trials_csv, AssertionOutcome, PhaseRow, PhaseTransition, TrialRecord, Variant,
};

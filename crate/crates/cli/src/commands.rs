//! The four subcommands. Each reads one JSON config and writes its outputs
//! into the output directory, overwriting earlier files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use unioncs::harness::{
    convergence_study, phase_transition, relative_error, write_convergence_csv, write_phase_csv,
    write_timings_csv, write_trials_csv, ExperimentSpec, ScheduleSpec, SetFamily, DEFAULT_HORIZONS,
};
use unioncs::sets::support_windows;
use unioncs::theory::{
    min_measurements, uniqueness_lower_bound, width_difference_cones, width_support_union, width_tangent_cone,
    WidthEstimate, DEFAULT_WIDTH_SAMPLES,
};
use unioncs::{solve, ConvexSetDescriptor, Execution, SolverConfig};

use crate::config::{self, overrides_json, Loaded, Override, ProblemSource};

/// Options shared by every subcommand.
pub struct RunContext {
    pub config: PathBuf,
    pub out: PathBuf,
    pub overrides: Vec<Override>,
    pub seed: Option<u64>,
    pub exec: Execution,
}

impl RunContext {
    fn load(&self) -> Result<Loaded> {
        config::load(&self.config, &self.overrides)
    }

    fn untouched(&self) -> bool {
        self.overrides.is_empty()
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn prepare_out(&self) -> Result<()> {
        fs::create_dir_all(&self.out).with_context(|| format!("cannot create output directory {}", self.out.display()))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn summary_base(&self) -> Value {
        json!({
            "config": self.config.display().to_string(),
            "overrides": overrides_json(&self.overrides),
            "seed_override": self.seed,
        })
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

// ------------------------------------------------------------------ solve

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    problem: ProblemSource,
    solver: SolverConfig,
}

pub fn solve_cmd(ctx: &RunContext) -> Result<i32> {
    let loaded = ctx.load()?;
    let cfg: SolveConfig = loaded.parse(ctx.untouched())?;
    let problem = cfg.problem.build(&loaded)?;
    let mut solver = cfg.solver;
    if let Some(seed) = ctx.seed {
        solver.seed = seed;
    }
    info!(
        "solving N={} M={} L={} for T={}",
        problem.dim(),
        problem.measurements(),
        problem.num_sets(),
        solver.horizon
    );
    let result = solve(&problem, &solver)?;
    ctx.prepare_out()?;

    let mut w = csv::Writer::from_writer(ctx.create("x_hat.csv")?);
    w.write_record(["index", "x_hat"])?;
    for (j, v) in result.x_hat.iter().enumerate() {
        w.write_record([j.to_string(), v.to_string()])?;
    }
    w.flush()?;
    let mut trace = ctx.create("trace.csv")?;
    result.trace.write_csv(&mut trace)?;
    trace.flush()?;
    let certs = result.certificates.as_ref().expect("solve computes certificates");
    ctx.write_json("certificates.json", certs)?;

    let rel_error = problem.x_true.as_ref().map(|x| relative_error(&result.x_hat, x));
    if let Some(e) = rel_error {
        println!("rel_error {e}");
    }
    println!("chosen_set {}", result.chosen_set);
    let summary = merge(
        ctx.summary_base(),
        json!({
            "iterations": result.iterations(),
            "chosen_set": result.chosen_set,
            "rel_error": rel_error,
            "certificates_hold": certs.holds(),
            "constants": result.constants,
            "p_bar": result.p_bar,
        }),
    );
    ctx.write_json("summary.json", &summary)?;
    Ok(0)
}

// ------------------------------------------------------------- experiment

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvergenceSection {
    schedules: Vec<ScheduleSpec>,
    #[serde(default)]
    horizons: Option<Vec<usize>>,
}

pub fn experiment_cmd(ctx: &RunContext) -> Result<i32> {
    let mut loaded = ctx.load()?;
    // the optional convergence section is not part of `ExperimentSpec`
    let convergence: Option<ConvergenceSection> = match loaded.value.as_object_mut().and_then(|m| m.remove("convergence")) {
        Some(v) => Some(serde_json::from_value(v).with_context(|| format!("{}: convergence section", loaded.path.display()))?),
        None => None,
    };
    let mut spec: ExperimentSpec = loaded.parse(ctx.untouched() && convergence.is_none())?;
    if let Some(seed) = ctx.seed {
        spec.seed = seed;
    }
    if let SetFamily::Custom { path: Some(p), sets } = &mut spec.set_family {
        sets.extend(config::read_sets(&loaded.resolve(p))?);
    }
    info!("running {} trials at M in {:?}", spec.trials, spec.m_grid);
    let pt = phase_transition(&spec, ctx.exec)?;
    ctx.prepare_out()?;

    let mut w = ctx.create("trials.csv")?;
    write_trials_csv(&pt.records, &mut w)?;
    w.flush()?;
    if spec.baseline {
        let mut w = ctx.create("baseline_trials.csv")?;
        write_trials_csv(&pt.baseline_records, &mut w)?;
        w.flush()?;
    }
    let mut w = ctx.create("phase.csv")?;
    write_phase_csv(&pt.rows, &mut w)?;
    w.flush()?;
    let mut w = ctx.create("timings.csv")?;
    write_timings_csv(&pt, &mut w)?;
    w.flush()?;

    let mut series = None;
    if let Some(c) = convergence {
        let horizons = c.horizons.unwrap_or_else(|| DEFAULT_HORIZONS.to_vec());
        let s = convergence_study(&spec, &c.schedules, &horizons, ctx.exec)?;
        let mut w = ctx.create("convergence.csv")?;
        write_convergence_csv(&s, &mut w)?;
        w.flush()?;
        series = Some(s);
    }

    for row in &pt.rows {
        println!(
            "M={} success_rate={} baseline={}",
            row.m,
            row.success_rate,
            row.baseline_success_rate.map(|b| b.to_string()).unwrap_or_else(|| "-".into())
        );
    }
    for a in &pt.assertions {
        println!("{} {:?}: {}", if a.passed { "PASS" } else { "FAIL" }, a.assertion, a.detail);
    }
    let rows: Vec<Value> = pt
        .rows
        .iter()
        .map(|r| {
            json!({
                "M": r.m,
                "trials": r.trials,
                "success_rate": r.success_rate,
                "mean_rel_error": r.mean_rel_error,
                "baseline_success_rate": r.baseline_success_rate,
                "baseline_mean_rel_error": r.baseline_mean_rel_error,
            })
        })
        .collect();
    let summary = merge(
        ctx.summary_base(),
        json!({
            "spec": spec,
            "rows": rows,
            "assertions": pt.assertions,
            "all_assertions_pass": pt.all_assertions_pass(),
            "convergence_slopes": series.map(|s| s.iter().map(|c| json!({
                "schedule": c.schedule,
                "step_energy_slope": c.step_energy_slope,
                "mw_regret_slope": c.mw_regret_slope,
            })).collect::<Vec<_>>()),
        }),
    );
    ctx.write_json("summary.json", &summary)?;
    Ok(if pt.all_assertions_pass() { 0 } else { 1 })
}

// ----------------------------------------------------------------- bounds

/// Window family whose widths are estimated by Monte Carlo: all windows of
/// width `K` in `R^N`, and the tangent cone at a point supported on the first
/// `K` coordinates.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowWidths {
    #[serde(alias = "N")]
    n: usize,
    #[serde(alias = "K")]
    k: usize,
    #[serde(default = "default_samples")]
    samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_WIDTH_SAMPLES
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    epsilon: f64,
    #[serde(default = "default_target")]
    target: f64,
    /// Measurement count to report at; defaults to the smallest reaching `target`.
    #[serde(default, alias = "M")]
    m: Option<u64>,
    #[serde(default)]
    omega_t: Option<f64>,
    #[serde(default)]
    omega_pairs: Option<Vec<f64>>,
    #[serde(default)]
    windows: Option<WindowWidths>,
    #[serde(default)]
    seed: u64,
}

fn default_target() -> f64 {
    0.9
}

pub fn bounds_cmd(ctx: &RunContext) -> Result<i32> {
    let loaded = ctx.load()?;
    let cfg: BoundsConfig = loaded.parse(ctx.untouched())?;
    let seed = ctx.seed.unwrap_or(cfg.seed);
    let (omega_t, omega_pairs) = match (cfg.omega_t, cfg.omega_pairs, &cfg.windows) {
        (Some(t), Some(p), None) => (t, p),
        (None, None, Some(w)) => {
            info!("estimating widths for windows of width {} in R^{}", w.k, w.n);
            let windows = support_windows(w.n, w.k)?;
            let pairs = width_difference_cones(&windows, w.n, w.samples, seed, ctx.exec)?;
            let mut x_ref = vec![0.0; w.n];
            x_ref[..w.k].iter_mut().for_each(|v| *v = 1.0);
            let t = width_tangent_cone(&x_ref, w.samples, seed.wrapping_add(1), ctx.exec)?;
            (t.mean, pairs.into_iter().map(|p| p.estimate.mean).collect())
        }
        _ => anyhow::bail!(config::ConfigError(format!(
            "{}: give either `omega_t` and `omega_pairs`, or `windows`",
            loaded.path.display()
        ))),
    };
    let mm = min_measurements(omega_t, &omega_pairs, cfg.epsilon, cfg.target)?;
    let m = cfg.m.unwrap_or(mm.constrained);
    let report = uniqueness_lower_bound(m, omega_t, &omega_pairs, cfg.epsilon)?;
    ctx.prepare_out()?;
    ctx.write_json("bounds.json", &report)?;
    let summary = merge(
        ctx.summary_base(),
        json!({ "target": cfg.target, "min_measurements": mm, "savings": mm.savings() }),
    );
    ctx.write_json("summary.json", &summary)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!(
        "savings: M without prior {} - M with prior {} = {} (target {})",
        mm.unconstrained,
        mm.constrained,
        mm.savings(),
        cfg.target
    );
    Ok(0)
}

// ------------------------------------------------------------------ width

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WidthConfig {
    #[serde(alias = "N")]
    n: usize,
    #[serde(default)]
    windows: Vec<ConvexSetDescriptor>,
    /// Adds every window of this width when given.
    #[serde(default, alias = "K")]
    k: Option<usize>,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
    /// Also estimate every pair's difference-cone width.
    #[serde(default)]
    pairs: bool,
    /// Also estimate the tangent-cone width at this point.
    #[serde(default)]
    x_ref: Option<Vec<f64>>,
}

fn width_row<W: Write>(w: &mut csv::Writer<W>, id: &str, e: &WidthEstimate) -> Result<()> {
    w.write_record([id.to_string(), e.mean.to_string(), e.std_error.to_string(), e.samples.to_string()])?;
    Ok(())
}

pub fn width_cmd(ctx: &RunContext) -> Result<i32> {
    let loaded = ctx.load()?;
    let cfg: WidthConfig = loaded.parse(ctx.untouched())?;
    let seed = ctx.seed.unwrap_or(cfg.seed);
    let mut windows = cfg.windows;
    if let Some(k) = cfg.k {
        windows.extend(support_windows(cfg.n, k)?);
    }
    let union = width_support_union(&windows, cfg.n, cfg.samples, seed, ctx.exec)?;
    ctx.prepare_out()?;
    let mut w = csv::Writer::from_writer(ctx.create("width.csv")?);
    w.write_record(["set_id", "mean", "std_error", "samples"])?;
    for (i, win) in windows.iter().enumerate() {
        let e = width_support_union(std::slice::from_ref(win), cfg.n, cfg.samples, seed, ctx.exec)?;
        width_row(&mut w, &i.to_string(), &e)?;
    }
    width_row(&mut w, "union", &union)?;
    if cfg.pairs {
        for p in width_difference_cones(&windows, cfg.n, cfg.samples, seed, ctx.exec)? {
            width_row(&mut w, &format!("{}-{}", p.i, p.j), &p.estimate)?;
        }
    }
    if let Some(x) = &cfg.x_ref {
        let e = width_tangent_cone(x, cfg.samples, seed, ctx.exec)?;
        width_row(&mut w, "tangent", &e)?;
    }
    w.flush()?;
    println!("union width {} +- {}", union.mean, union.std_error);
    Ok(0)
}

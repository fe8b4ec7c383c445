//! The multiplicative-weights proximal solver and its regularized variant.
//!
//! Each iteration evaluates every `f_i` at the current signal `x_t`, takes a
//! proximal-gradient step in `x` under the current weights `p_t`, and moves
//! the weights with either a multiplicative-weights step or a projected
//! gradient step on `𝓛 + (λ3/2)‖p − q‖²`. The output is the average of the
//! iterates projected onto the nearest set.

mod certify;
mod config;
mod model;
mod trace;
mod update;

use serde::{Deserialize, Serialize};

pub use certify::{certificates, CertificateReport};
pub use config::{PSchedule, SolverConfig, StepSize, STOP_PATIENCE};
pub use model::{lagrangian, objective_components, prox_gradient_step_x, Constants, Model};
pub use trace::{Trace, TraceRecord};
pub use update::{mw_update_p, regularized_update_p};

use crate::error::Result;
use crate::linalg::{dist2_sq, dot, Vector};
use crate::problem::ProblemInstance;
use crate::sets::project_union;
use crate::simplex::SimplexPoint;

/// Output of a solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    /// `x̄` projected onto the nearest set.
    pub x_hat: Vector,
    /// Index of the set `x_hat` lies in.
    pub chosen_set: usize,
    pub x_bar: Vector,
    pub p_bar: SimplexPoint,
    pub trace: Trace,
    /// Absent for runs made with [`solve_uncertified`].
    pub certificates: Option<CertificateReport>,
    pub constants: Constants,
}

impl SolverResult {
    /// Iterations actually run; below the horizon after an early stop.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Step size for the weights at iteration `t` (1-based), and whether the
/// weights restart from uniform first.
fn eta_p(model: &Model<'_>, t: usize) -> (f64, bool) {
    let cfg = model.cfg;
    let l = model.problem.num_sets() as f64;
    let spread = if cfg.is_regularized() { model.constants.r_g } else { model.constants.r_f };
    let base = (2.0 * l.ln()).sqrt() / spread;
    let tf = t as f64;
    let (eta, restart) = match cfg.p_schedule {
        PSchedule::FixedHorizon => (base / (cfg.horizon as f64).sqrt(), false),
        PSchedule::Doubling => {
            let epoch_start = 1usize << (usize::BITS - 1 - t.leading_zeros());
            (base / (epoch_start as f64).sqrt(), t == epoch_start && t > 1)
        }
        PSchedule::InverseT => (1.0 / (cfg.lambda3 * tf), false),
        PSchedule::InverseTSquared => (cfg.eta_p0.unwrap_or(base) / (tf * tf), false),
    };
    (eta * cfg.eta_p_scale, restart)
}

/// Runs the solver and computes its certificates.
pub fn solve(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverResult> {
    let model = Model::new(problem, cfg)?;
    let mut result = run(&model)?;
    result.certificates = Some(certify::certify(&model, &result.trace)?);
    Ok(result)
}

/// Runs the solver without the certificate computation, which costs up to
/// ten times the horizon in extra iterations.
pub fn solve_uncertified(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverResult> {
    run(&Model::new(problem, cfg)?)
}

fn run(model: &Model<'_>) -> Result<SolverResult> {
    let problem = model.problem;
    let cfg = model.cfg;
    let (n, l) = (problem.dim(), problem.num_sets());
    let uniform = SimplexPoint::uniform(l)?;
    let mut x = vec![0.0; n];
    let mut p = uniform.clone();
    let mut trace = Trace::new(n, l, cfg.horizon);
    let mut small_steps = 0;
    let mut ws = model.workspace();
    let mut next_x = vec![0.0; n];

    for t in 1..=cfg.horizon {
        let (eta, restart) = eta_p(model, t);
        if restart {
            p = uniform.clone();
        }
        model.evaluate_into(&x, p.weights(), &mut ws);
        let pf = dot(p.weights(), &ws.f);
        let reg = model.regularizer(p.weights());
        let (min_f, max_f) = ws
            .f
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));

        model.prox_step_into(&x, &ws.grad, model.constants.eta_x, &mut next_x);
        let step_sq = dist2_sq(&next_x, &x);

        trace.records.push(crate::solver::TraceRecord {
            t,
            l_value: pf + reg,
            min_f,
            max_f,
            step_sq,
            p_entropy: p.entropy(),
            eta_p: eta,
            restart,
        });
        for (s, v) in trace.sum_f.iter_mut().zip(&ws.f) {
            *s += v;
        }
        for (s, v) in trace.sum_p.iter_mut().zip(p.weights()) {
            *s += v;
        }
        for (s, v) in trace.sum_x.iter_mut().zip(&x) {
            *s += v;
        }
        trace.sum_pf += pf;
        trace.sum_reg += reg;
        trace.f_max_observed = trace.f_max_observed.max(max_f);

        p = match &cfg.prior_q {
            Some(q) if cfg.is_regularized() => {
                update::regularized_step(p.weights(), &ws.f, q.weights(), cfg.lambda3, eta)?
            }
            _ => update::mw_step(p.weights(), &ws.f, eta),
        };
        std::mem::swap(&mut x, &mut next_x);

        if cfg.stop_tol > 0.0 {
            small_steps = if step_sq.sqrt() <= cfg.stop_tol { small_steps + 1 } else { 0 };
            if small_steps >= STOP_PATIENCE {
                break;
            }
        }
    }

    let tf = trace.len() as f64;
    let x_bar: Vec<f64> = trace.sum_x.iter().map(|s| s / tf).collect();
    let p_bar = SimplexPoint::normalized(trace.sum_p.clone());
    let (x_hat, chosen_set) = project_union(&problem.sets, &x_bar)?;
    Ok(SolverResult {
        x_hat: Vector::new(x_hat)?,
        chosen_set,
        x_bar: Vector::new(x_bar)?,
        p_bar,
        trace,
        certificates: None,
        constants: model.constants.clone(),
    })
}

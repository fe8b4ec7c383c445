use serde::{Deserialize, Serialize};

use super::config::{PSchedule, SolverConfig};
use super::model::Model;
use super::trace::Trace;
use crate::error::{Error, Result};
use crate::linalg::{dist2_sq, dot};
use crate::problem::ProblemInstance;
use crate::simplex::{project_simplex, SimplexPoint};

/// Inner iterations per outer iteration allowed when solving for `x*`.
const INNER_FACTOR: usize = 10;
const INNER_TOL: f64 = 1e-10;

/// Empirical left-hand sides of the convergence guarantees next to their
/// right-hand sides. Every quantity is averaged over the iterations run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub iterations: usize,
    /// Regret of the weight sequence against the best fixed weights. On the
    /// regularized path the losses include `(λ3/2)‖p − q‖²`.
    pub mw_regret: f64,
    /// Absent when the schedule has no regret guarantee.
    pub mw_regret_bound: Option<f64>,
    /// `(1/T) Σ_t 𝓛(p_t, x_t) − 𝓛(p̄, x*)`
    pub prox_gap: f64,
    /// `2R² / (η_x T)`
    pub prox_gap_bound: f64,
    /// Upper bound on the suboptimality of the computed `x*`.
    pub prox_gap_residual: f64,
    /// `(1/T) Σ_t ‖x_{t+1} − x_t‖²`
    pub step_energy: f64,
    pub step_energy_bound: f64,
    pub r_f_used: f64,
    pub r_f_observed: f64,
    pub r_g_used: f64,
    pub l_h_used: f64,
    pub eta_x_used: f64,
}

impl CertificateReport {
    /// True when every empirical value sits at or below its bound.
    pub fn holds(&self) -> bool {
        self.mw_regret_bound.map_or(true, |b| self.mw_regret <= b)
            && self.prox_gap <= self.prox_gap_bound + self.prox_gap_residual
            && self.step_energy <= self.step_energy_bound
    }
}

/// Certificates for a finished run of `cfg` on `problem`.
pub fn certificates(trace: &Trace, cfg: &SolverConfig, problem: &ProblemInstance) -> Result<CertificateReport> {
    let model = Model::new(problem, cfg)?;
    certify(&model, trace)
}

pub(crate) fn certify(model: &Model<'_>, trace: &Trace) -> Result<CertificateReport> {
    if trace.is_empty() {
        return Err(Error::invalid("certificates need a nonempty trace"));
    }
    let cfg = model.cfg;
    let k = &model.constants;
    let l = trace.sum_f.len();
    let t = trace.len();
    let tf = t as f64;
    let restarts = trace.records.iter().filter(|r| r.restart).count() as f64;
    let eta_sum: f64 = trace.records.iter().map(|r| r.eta_p).sum();

    let mw_regret;
    let mw_regret_bound;
    if let (true, Some(q)) = (cfg.is_regularized(), &cfg.prior_q) {
        let fbar: Vec<f64> = trace.sum_f.iter().map(|s| s / tf).collect();
        let target: Vec<f64> = q.weights().iter().zip(&fbar).map(|(qi, fi)| qi - fi / cfg.lambda3).collect();
        let best = project_simplex(&target)?;
        let best_value = dot(best.weights(), &fbar) + 0.5 * cfg.lambda3 * dist2_sq(best.weights(), q.weights());
        mw_regret = (trace.sum_pf + trace.sum_reg) / tf - best_value;
        mw_regret_bound = match cfg.p_schedule {
            PSchedule::InverseT if cfg.eta_p_scale == 1.0 => {
                Some(k.r_g * k.r_g * (1.0 + tf.ln()) / (2.0 * cfg.lambda3 * tf))
            }
            _ => None,
        };
    } else {
        let best_sum = trace.sum_f.iter().cloned().fold(f64::INFINITY, f64::min);
        mw_regret = (trace.sum_pf - best_sum) / tf;
        let ln_l = (l as f64).ln();
        mw_regret_bound = if l == 1 {
            Some(0.0)
        } else {
            match cfg.p_schedule {
                PSchedule::FixedHorizon | PSchedule::Doubling => {
                    // one fixed-step bound per epoch; the fixed-horizon schedule is a single epoch
                    let mut total = 0.0;
                    let mut start = 0;
                    while start < t {
                        let eta = trace.records[start].eta_p;
                        let end = (start + 1..t)
                            .find(|&i| trace.records[i].restart)
                            .unwrap_or(t);
                        let m = (end - start) as f64;
                        total += ln_l / eta + eta * k.r_f * k.r_f * m / 2.0;
                        start = end;
                    }
                    Some(total / tf)
                }
                _ => None,
            }
        };
    }

    // x* for the averaged weights, warm-started at the averaged iterate
    let pbar = SimplexPoint::normalized(trace.sum_p.clone());
    let mut z: Vec<f64> = trace.sum_x.iter().map(|s| s / tf).collect();
    let mut last_move = f64::INFINITY;
    let mut ws = model.workspace();
    let mut next = vec![0.0; z.len()];
    for _ in 0..INNER_FACTOR * t {
        model.evaluate_into(&z, pbar.weights(), &mut ws);
        model.prox_step_into(&z, &ws.grad, k.eta_x, &mut next);
        last_move = dist2_sq(&next, &z).sqrt();
        std::mem::swap(&mut z, &mut next);
        if last_move <= INNER_TOL {
            break;
        }
    }
    let prox_gap = trace.sum_pf / tf - model.weighted(pbar.weights(), &z);
    let prox_gap_residual = 2.0 * cfg.radius * last_move / k.eta_x;

    let step_energy = trace.records.iter().map(|r| r.step_sq).sum::<f64>() / tf;
    let initial = trace.records[0].l_value;
    let step_energy_bound = if cfg.is_regularized() {
        let eta_terms: f64 = trace
            .records
            .iter()
            .map(|r| r.eta_p + 0.5 * cfg.lambda3 * r.eta_p * r.eta_p)
            .sum();
        (2.0 * initial + 2.0 * k.r_g * k.r_g * eta_terms + 2.0 * (k.r_f + cfg.lambda3) * restarts) / (k.l_h * tf)
    } else {
        (2.0 * initial + 4.0 * k.r_f * k.r_f * eta_sum + 2.0 * k.r_f * restarts) / (k.l_h * tf)
    };

    Ok(CertificateReport {
        iterations: t,
        mw_regret,
        mw_regret_bound,
        prox_gap,
        prox_gap_bound: 2.0 * cfg.radius * cfg.radius / (k.eta_x * tf),
        prox_gap_residual,
        step_energy,
        step_energy_bound,
        r_f_used: k.r_f,
        r_f_observed: trace.f_max_observed,
        r_g_used: k.r_g,
        l_h_used: k.l_h,
        eta_x_used: k.eta_x,
    })
}

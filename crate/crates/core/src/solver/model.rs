//! The objective `f_i(x) = ‖x‖₁ + h_i(x) + (λ1/2)‖y − Ax‖² + (λ2/2)‖x‖²`, its
//! smooth gradient, and the constants derived from a problem/config pair.

use serde::{Deserialize, Serialize};

use super::config::{SolverConfig, StepSize};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist2_sq, dot, norm1, norm2, spectral_norm};
use crate::problem::ProblemInstance;
use crate::sets::{smoothness_constant, ConvexSetDescriptor, PenaltyConfig};
use crate::simplex::SimplexPoint;

const POWER_ITERS: usize = 2000;
const POWER_TOL: f64 = 1e-13;
/// Inflation of the power-iteration estimate so that `‖A‖` is bounded above.
const NORM_SAFETY: f64 = 1.0 + 1e-6;

/// Constants fixed before the first iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Upper bound on `‖A‖₂`.
    pub norm_a: f64,
    pub penalty: PenaltyConfig,
    /// Smoothness constant of the smooth part of every `f_i`.
    pub l_h: f64,
    /// Bound on `|f_i(x)|` over `‖x‖ ≤ R`.
    pub r_f: f64,
    /// Bound on the norm of the regularized weight gradient.
    pub r_g: f64,
    pub eta_x: f64,
}

/// A problem bound to a configuration, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Model<'a> {
    pub problem: &'a ProblemInstance,
    pub cfg: &'a SolverConfig,
    pub constants: Constants,
    /// Inclusive 0-based coordinate ranges when every set is a support window.
    windows: Option<Vec<(usize, usize)>>,
}

/// Scratch buffers reused across iterations.
pub(crate) struct Workspace {
    r: Vec<f64>,
    atr: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
    pub grad: Vec<f64>,
    h: Vec<f64>,
    pub f: Vec<f64>,
}

impl<'a> Model<'a> {
    pub fn new(problem: &'a ProblemInstance, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let l = problem.num_sets();
        if let Some(q) = &cfg.prior_q {
            check_dim("prior_q vs number of sets", l, q.len())?;
        }
        let sigma = spectral_norm(&problem.a, POWER_ITERS, POWER_TOL)?;
        let norm_a = sigma * NORM_SAFETY;
        let scale = match cfg.penalty_scale {
            Some(c) => c,
            None if norm_a > 0.0 => 10.0 * cfg.lambda1 * norm_a * norm_a,
            None => 10.0 * cfg.lambda1,
        };
        let penalty = PenaltyConfig::new(scale)?;
        let max_lh = problem
            .sets
            .iter()
            .map(|s| smoothness_constant(s, penalty))
            .fold(0.0, f64::max);
        let l_h = max_lh + cfg.lambda1 * norm_a * norm_a + cfg.lambda2;

        let r = cfg.radius;
        let n = problem.dim() as f64;
        let max_h = problem
            .sets
            .iter()
            .map(|s| s.penalty_bound(penalty, r))
            .fold(0.0, f64::max);
        let y_norm = norm2(&problem.y);
        let r_f = n.sqrt() * r
            + max_h
            + 0.5 * cfg.lambda1 * (y_norm + norm_a * r).powi(2)
            + 0.5 * cfg.lambda2 * r * r;
        let r_g = (l as f64).sqrt() * r_f + cfg.lambda3 * std::f64::consts::SQRT_2;

        let eta_x = match cfg.eta_x {
            StepSize::Auto => 1.0 / l_h,
            StepSize::Fixed(v) if v <= 1.0 / l_h => v,
            StepSize::Fixed(v) => {
                return Err(Error::invalid(format!(
                    "eta_x = {v} exceeds 1/L_h = {}; the descent guarantee needs eta_x <= 1/L_h",
                    1.0 / l_h
                )))
            }
        };

        let windows = problem
            .sets
            .iter()
            .map(|s| match s {
                ConvexSetDescriptor::SupportWindow { start, width } => Some((start - 1, start - 1 + width)),
                _ => None,
            })
            .collect::<Option<Vec<_>>>();

        Ok(Model {
            problem,
            cfg,
            constants: Constants { norm_a, penalty, l_h, r_f, r_g, eta_x },
            windows,
        })
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        check_dim("signal vs matrix columns", self.problem.dim(), x.len())
    }

    fn check_p(&self, p: &SimplexPoint) -> Result<()> {
        check_dim("weights vs number of sets", self.problem.num_sets(), p.len())
    }

    /// Terms shared by every `f_i`: `‖x‖₁ + (λ1/2)‖Ax − y‖² + (λ2/2)‖x‖²`;
    /// leaves the residual `Ax − y` in `r`.
    fn shared_into(&self, x: &[f64], r: &mut [f64]) -> f64 {
        self.problem.a.mul_vec_into(x, r);
        for (ri, yi) in r.iter_mut().zip(self.problem.y.iter()) {
            *ri -= yi;
        }
        norm1(x) + 0.5 * self.cfg.lambda1 * dot(r, r) + 0.5 * self.cfg.lambda2 * dot(x, x)
    }

    fn shared(&self, x: &[f64]) -> f64 {
        let mut r = vec![0.0; self.problem.measurements()];
        self.shared_into(x, &mut r)
    }

    /// Writes `h_i(x)` into `h` and, when `p` is given, `Σ p_i ∇h_i(x)` into `grad`.
    fn penalties_into(&self, x: &[f64], p: Option<&[f64]>, ws: &mut Workspace) {
        let c = self.constants.penalty.scale;
        let n = x.len();
        ws.grad.iter_mut().for_each(|g| *g = 0.0);
        if let Some(windows) = &self.windows {
            // prefix[j] = Σ_{k<j} x_k², suffix[j] = Σ_{k≥j} x_k²
            let (prefix, suffix) = (&mut ws.prefix, &mut ws.suffix);
            prefix[0] = 0.0;
            for j in 0..n {
                prefix[j + 1] = prefix[j] + x[j] * x[j];
            }
            suffix[n] = 0.0;
            for j in (0..n).rev() {
                suffix[j] = suffix[j + 1] + x[j] * x[j];
            }
            for (h, &(lo, hi)) in ws.h.iter_mut().zip(windows) {
                *h = c * (prefix[lo] + suffix[hi + 1]);
            }
            if let Some(p) = p {
                // weight of coordinate j = Σ_{i : j ∉ W_i} p_i, split into
                // windows ending before j and windows starting after j
                let (before, after) = (&mut ws.prefix, &mut ws.suffix);
                before.iter_mut().for_each(|v| *v = 0.0);
                after.iter_mut().for_each(|v| *v = 0.0);
                for (&(lo, hi), &pi) in windows.iter().zip(p) {
                    after[lo] += pi;
                    before[hi + 1] += pi;
                }
                let mut ends_before = 0.0;
                let mut starts_after: f64 = after.iter().sum();
                for j in 0..n {
                    ends_before += before[j];
                    starts_after -= after[j];
                    ws.grad[j] = 2.0 * c * (ends_before + starts_after.max(0.0)) * x[j];
                }
            }
        } else {
            for (i, s) in self.problem.sets.iter().enumerate() {
                let (hi, gi) = s.penalty_and_grad(self.constants.penalty, x);
                ws.h[i] = hi;
                if let Some(p) = p {
                    if p[i] != 0.0 {
                        for (g, v) in ws.grad.iter_mut().zip(&gi) {
                            *g += p[i] * v;
                        }
                    }
                }
            }
        }
    }

    /// Fills `ws.f` with every `f_i(x)` and `ws.grad` with the gradient of
    /// `Σ p_i (f_i − ‖·‖₁)` at `x`.
    pub(crate) fn evaluate_into(&self, x: &[f64], p: &[f64], ws: &mut Workspace) {
        let base = self.shared_into(x, &mut ws.r);
        self.penalties_into(x, Some(p), ws);
        let mass: f64 = p.iter().sum();
        self.problem.a.mul_t_vec_into(&ws.r, &mut ws.atr);
        let (l1, l2) = (self.cfg.lambda1, self.cfg.lambda2);
        for ((g, ar), xj) in ws.grad.iter_mut().zip(&ws.atr).zip(x) {
            *g += mass * (l1 * ar + l2 * xj);
        }
        for (f, h) in ws.f.iter_mut().zip(&ws.h) {
            *f = base + h;
        }
    }

    pub(crate) fn workspace(&self) -> Workspace {
        let (n, m, l) = (self.problem.dim(), self.problem.measurements(), self.problem.num_sets());
        Workspace {
            r: vec![0.0; m],
            atr: vec![0.0; n],
            prefix: vec![0.0; n + 1],
            suffix: vec![0.0; n + 1],
            grad: vec![0.0; n],
            h: vec![0.0; l],
            f: vec![0.0; l],
        }
    }

    /// `f_i(x)` for every set.
    pub fn components(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let base = self.shared(x);
        let mut ws = self.workspace();
        self.penalties_into(x, None, &mut ws);
        Ok(ws.h.into_iter().map(|h| base + h).collect())
    }

    /// `(λ3/2)‖p − q‖²`, zero on the multiplicative-weights path.
    pub fn regularizer(&self, p: &[f64]) -> f64 {
        match &self.cfg.prior_q {
            Some(q) if self.cfg.is_regularized() => 0.5 * self.cfg.lambda3 * dist2_sq(p, q.weights()),
            _ => 0.0,
        }
    }

    /// `Σ p_i f_i(x)`, plus the regularizer on the regularized path.
    pub fn lagrangian(&self, p: &SimplexPoint, x: &[f64]) -> Result<f64> {
        self.check_p(p)?;
        let f = self.components(x)?;
        Ok(dot(p.weights(), &f) + self.regularizer(p.weights()))
    }

    /// `Σ p_i f_i(x)` without the regularizer.
    pub(crate) fn weighted(&self, p: &[f64], x: &[f64]) -> f64 {
        let base = self.shared(x);
        let mut ws = self.workspace();
        self.penalties_into(x, None, &mut ws);
        let mass: f64 = p.iter().sum();
        mass * base + dot(p, &ws.h)
    }

    /// One proximal-gradient step with step `eta`, kept inside the radius-`R` ball.
    pub fn step_x(&self, x: &[f64], p: &SimplexPoint, eta: f64) -> Result<Vec<f64>> {
        self.check_x(x)?;
        self.check_p(p)?;
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid(format!("eta_x must be positive, got {eta}")));
        }
        let mut ws = self.workspace();
        self.evaluate_into(x, p.weights(), &mut ws);
        let mut z = vec![0.0; x.len()];
        self.prox_step_into(x, &ws.grad, eta, &mut z);
        Ok(z)
    }

    pub(crate) fn prox_step_into(&self, x: &[f64], grad: &[f64], eta: f64, z: &mut [f64]) {
        for ((zj, xj), gj) in z.iter_mut().zip(x).zip(grad) {
            *zj = xj - eta * gj;
        }
        crate::prox::soft_threshold_in_place(z, eta);
        let nz = norm2(z);
        if nz > self.cfg.radius {
            let s = self.cfg.radius / nz;
            z.iter_mut().for_each(|v| *v *= s);
        }
    }
}

/// `f_i(x)` for every set of `problem` under `cfg`.
pub fn objective_components(problem: &ProblemInstance, cfg: &SolverConfig, x: &[f64]) -> Result<Vec<f64>> {
    Model::new(problem, cfg)?.components(x)
}

/// `𝓛(p, x) = Σ p_i f_i(x)`, plus `(λ3/2)‖p − q‖²` when `λ3 > 0`.
pub fn lagrangian(problem: &ProblemInstance, cfg: &SolverConfig, p: &SimplexPoint, x: &[f64]) -> Result<f64> {
    Model::new(problem, cfg)?.lagrangian(p, x)
}

/// `prox_{η‖·‖₁}[x − η ∇(Σ p_i h_i + (λ1/2)‖y − A·‖² + (λ2/2)‖·‖²)(x)]`,
/// rescaled into the radius-`R` ball.
pub fn prox_gradient_step_x(
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    x: &[f64],
    p: &SimplexPoint,
    eta_x: f64,
) -> Result<Vec<f64>> {
    Model::new(problem, cfg)?.step_x(x, p, eta_x)
}

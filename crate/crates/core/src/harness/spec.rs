use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::ConvexSetDescriptor;
use crate::solver::SolverConfig;

/// Which union the generated signals are drawn from and measured against.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetFamily {
    /// All `N − K` sliding windows of `K + 1` coordinates, with `y = A x♮`.
    #[default]
    Windows,
    /// Window-sparse signals seen only through a uniform quantizer on
    /// `[-range, range]`; the cells form one intersection set and the data
    /// term is switched off.
    Quantized { bits: u32, range: f64 },
    /// Window-sparse signals seen through `|⟨a_i, x⟩|²`; one set per sign
    /// branch, data term off. Needs `M ≤ 10`.
    PhaseBranches,
    /// A fixed list of sets; signals are projections of Gaussian points onto
    /// a uniformly chosen set, measured as `y = A x♮`.
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
        #[serde(default)]
        sets: Vec<ConvexSetDescriptor>,
    },
}

/// A check evaluated on the phase-transition table after a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assertion {
    /// At every `M`, constrained success rate ≥ baseline rate minus one
    /// binomial standard deviation.
    DominatesBaseline,
    /// Constrained runs reach `rate` at some `M` strictly below the first `M`
    /// where the baseline does.
    Savings { rate: f64 },
    /// Success rate at `m` is at least `rate`.
    MinSuccessRate { m: usize, rate: f64 },
}

fn default_tol() -> f64 {
    1e-3
}

fn yes() -> bool {
    true
}

/// A seeded recovery experiment over a grid of measurement counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(alias = "N")]
    pub n: usize,
    #[serde(alias = "K")]
    pub k: usize,
    #[serde(alias = "M_grid")]
    pub m_grid: Vec<usize>,
    #[serde(default)]
    pub set_family: SetFamily,
    pub trials: usize,
    pub solver: SolverConfig,
    /// Relative ℓ2 error counted as a success.
    #[serde(default = "default_tol")]
    pub success_tol: f64,
    #[serde(default)]
    pub seed: u64,
    /// Also run each instance with the single whole-space set.
    #[serde(default = "yes")]
    pub baseline: bool,
    /// Standard deviation of additive Gaussian noise on `y`; 0 is noiseless.
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<Assertion>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        if self.k == 0 || self.k >= self.n {
            return Err(Error::invalid(format!("K = {} must satisfy 1 <= K < N = {}", self.k, self.n)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.m_grid.is_empty() {
            return Err(Error::invalid("M_grid must not be empty"));
        }
        if self.m_grid.contains(&0) {
            return Err(Error::invalid("every M in M_grid must be at least 1"));
        }
        if !(self.success_tol > 0.0) {
            return Err(Error::invalid("success_tol must be positive"));
        }
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return Err(Error::invalid("noise_std must be nonnegative"));
        }
        match &self.set_family {
            SetFamily::Quantized { bits, range } => {
                crate::sets::uniform_quantizer_edges(*bits, -range, *range)?;
            }
            SetFamily::PhaseBranches => {
                if let Some(m) = self.m_grid.iter().find(|m| **m > crate::sets::DEFAULT_MAX_PHASE_ROWS) {
                    return Err(Error::Capacity(format!(
                        "phase branches for M = {m} exceed the {}-row limit",
                        crate::sets::DEFAULT_MAX_PHASE_ROWS
                    )));
                }
            }
            SetFamily::Custom { sets, path } => {
                if sets.is_empty() {
                    return Err(Error::invalid(match path {
                        Some(p) => format!("custom set file {p} was not loaded"),
                        None => "custom set family needs at least one set".to_string(),
                    }));
                }
                for s in sets {
                    s.validate(self.n)?;
                }
            }
            SetFamily::Windows => {}
        }
        self.solver.validate()
    }
}

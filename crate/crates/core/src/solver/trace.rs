use std::io::Write;

use serde::{Deserialize, Serialize};

/// One iteration of a run, recorded at the iterate `(x_t, p_t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    /// `𝓛(p_t, x_t)`, including the regularizer on the regularized path.
    pub l_value: f64,
    pub min_f: f64,
    pub max_f: f64,
    /// `‖x_{t+1} − x_t‖²`
    pub step_sq: f64,
    pub p_entropy: f64,
    pub eta_p: f64,
    /// The weights were reset to uniform before this iteration.
    pub restart: bool,
}

/// Per-iteration records plus the running sums the certificates need.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    /// `Σ_t f(x_t)`
    pub sum_f: Vec<f64>,
    /// `Σ_t p_t`
    pub sum_p: Vec<f64>,
    /// `Σ_t x_t`
    pub sum_x: Vec<f64>,
    /// `Σ_t ⟨p_t, f(x_t)⟩`
    pub sum_pf: f64,
    /// `Σ_t (λ3/2)‖p_t − q‖²`
    pub sum_reg: f64,
    /// Largest `|f_i(x_t)|` seen.
    pub f_max_observed: f64,
}

impl Trace {
    pub(crate) fn new(n: usize, l: usize, horizon: usize) -> Self {
        Trace {
            records: Vec::with_capacity(horizon),
            sum_f: vec![0.0; l],
            sum_p: vec![0.0; l],
            sum_x: vec![0.0; n],
            sum_pf: 0.0,
            sum_reg: 0.0,
            f_max_observed: 0.0,
        }
    }

    /// Iterations recorded.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV with columns `t,L_value,min_f,max_f,step_sq,p_entropy`, floats in
    /// shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,L_value,min_f,max_f,step_sq,p_entropy")?;
        for r in &self.records {
            writeln!(w, "{},{},{},{},{},{}", r.t, r.l_value, r.min_f, r.max_f, r.step_sq, r.p_entropy)?;
        }
        Ok(())
    }
}

use rand::Rng;

use super::spec::{ExperimentSpec, SetFamily};
use crate::error::Result;
use crate::linalg::{norm2, Matrix, Vector};
use crate::problem::ProblemInstance;
use crate::rng::{fill_standard_normal, standard_normal_vec, stream, Purpose};
use crate::sets::{
    phase_retrieval_branches, project_set, quantize, quantized_cells, support_windows, uniform_quantizer_edges,
    ConvexSetDescriptor, DEFAULT_MAX_PHASE_ROWS,
};

/// A generated instance with its ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub problem: ProblemInstance,
    pub x_true: Vector,
    /// Index of a set containing `x_true`.
    pub true_set: usize,
}

/// `A` with i.i.d. standard normal entries drawn row by row, so the instance
/// at a smaller `M` is the top rows of the one at a larger `M`.
fn sensing_matrix(spec: &ExperimentSpec, trial_id: u64, m: usize) -> Result<Matrix> {
    let mut rng = stream(spec.seed, trial_id, Purpose::SensingMatrix);
    let mut data = vec![0.0; m * spec.n];
    fill_standard_normal(&mut rng, &mut data);
    Matrix::new(m, spec.n, data)
}

/// Unit-norm signal supported on one of the `N − K` windows, and that window's index.
fn window_signal(spec: &ExperimentSpec, trial_id: u64) -> (Vec<f64>, usize) {
    let mut rng = stream(spec.seed, trial_id, Purpose::SignalSupport);
    let window = rng.random_range(0..spec.n - spec.k);
    let mut vals = stream(spec.seed, trial_id, Purpose::SignalValues);
    let v = standard_normal_vec(&mut vals, spec.k + 1);
    let scale = norm2(&v);
    let mut x = vec![0.0; spec.n];
    for (j, vj) in v.iter().enumerate() {
        x[window + j] = vj / scale;
    }
    (x, window)
}

/// Builds the `(trial_id, M)` instance; every random draw comes from a stream
/// keyed by `(seed, trial_id, purpose)`.
pub fn generate_problem(spec: &ExperimentSpec, trial_id: u64, m: usize) -> Result<Generated> {
    spec.validate()?;
    let a = sensing_matrix(spec, trial_id, m)?;
    let noisy = |mut y: Vec<f64>| {
        if spec.noise_std > 0.0 {
            let mut rng = stream(spec.seed, trial_id, Purpose::Custom(1));
            let e = standard_normal_vec(&mut rng, y.len());
            y.iter_mut().zip(e).for_each(|(yi, ei)| *yi += spec.noise_std * ei);
        }
        y
    };
    let (problem, x_true, true_set) = match &spec.set_family {
        SetFamily::Windows => {
            let (x, window) = window_signal(spec, trial_id);
            let y = noisy(a.mul_vec(&x)?);
            let sets = support_windows(spec.n, spec.k)?;
            (ProblemInstance::new(a, Vector::new(y)?, sets, None)?, x, window)
        }
        SetFamily::Quantized { bits, range } => {
            let (x, _) = window_signal(spec, trial_id);
            let edges = uniform_quantizer_edges(*bits, -range, *range)?;
            let levels = a
                .mul_vec(&x)?
                .into_iter()
                .map(|v| quantize(&edges, v).map(|k| k as f64))
                .collect::<Result<Vec<_>>>()?;
            let cells = quantized_cells(&a, &levels, &edges)?;
            let set = ConvexSetDescriptor::Intersection { parts: cells };
            let p = ProblemInstance::new(Matrix::zeros(m, spec.n)?, Vector::zeros(m), vec![set], None)?;
            (p, x, 0)
        }
        SetFamily::PhaseBranches => {
            let (x, _) = window_signal(spec, trial_id);
            let ax = a.mul_vec(&x)?;
            let mags: Vec<f64> = ax.iter().map(|v| v * v).collect();
            let branches = phase_retrieval_branches(&a, &mags, DEFAULT_MAX_PHASE_ROWS)?;
            // bit j of the branch index is set when the j-th nonzero row is negative
            let mut index = 0;
            let mut bit = 0;
            for (v, mag) in ax.iter().zip(&mags) {
                if *mag > 0.0 {
                    if *v < 0.0 {
                        index |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            let p = ProblemInstance::new(Matrix::zeros(m, spec.n)?, Vector::zeros(m), branches, None)?;
            (p, x, index)
        }
        SetFamily::Custom { sets, .. } => {
            let mut rng = stream(spec.seed, trial_id, Purpose::SignalSupport);
            let chosen = rng.random_range(0..sets.len());
            let mut vals = stream(spec.seed, trial_id, Purpose::SignalValues);
            let g = standard_normal_vec(&mut vals, spec.n);
            let x = project_set(&sets[chosen], &g)?;
            let y = noisy(a.mul_vec(&x)?);
            (ProblemInstance::new(a, Vector::new(y)?, sets.clone(), None)?, x, chosen)
        }
    };
    let x_true = Vector::new(x_true)?;
    let mut problem = problem;
    problem.x_true = Some(x_true.clone());
    Ok(Generated { problem, x_true, true_set })
}

/// The same measurements with the prior replaced by the whole space.
pub fn baseline_problem(generated: &Generated) -> Result<ProblemInstance> {
    let p = &generated.problem;
    ProblemInstance::new(
        p.a.clone(),
        p.y.clone(),
        vec![ConvexSetDescriptor::whole_space(p.dim())],
        p.x_true.clone(),
    )
}

/// `‖x − x♮‖ / ‖x♮‖`, or `‖x‖` when `x♮ = 0`.
pub fn relative_error(x: &[f64], x_true: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(x_true).map(|(a, b)| a - b).collect();
    let scale = norm2(x_true);
    if scale > 0.0 {
        norm2(&diff) / scale
    } else {
        norm2(&diff)
    }
}


use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::{fill_standard_normal, stream, Purpose};
use crate::linalg::{dist2_sq, dot, Vector};
use crate::sets::{project_set, ConvexSetDescriptor};

/// Default Monte Carlo sample count for width estimates.
pub const DEFAULT_WIDTH_SAMPLES: usize = 20_000;
/// Samples per independent random stream. Blocks are reduced in index order,
/// so estimates do not depend on how blocks are scheduled.
pub const BLOCK_SIZE: usize = 1024;
const MIN_SAMPLES: usize = 100;
const GOLDEN_TOL: f64 = 1e-8;

/// Monte Carlo estimate of a Gaussian width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let d = v - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn estimate(self) -> WidthEstimate {
        let var = self.m2 / (self.n - 1.0);
        WidthEstimate {
            mean: self.mean,
            std_error: (var.max(0.0) / self.n).sqrt(),
            samples: self.n as usize,
        }
    }
}

/// Runs `per_sample` on `samples` Gaussian vectors of length `n`; each call
/// writes `k` values into its output slice. Returns one estimate per value.
fn monte_carlo<F>(n: usize, k: usize, samples: usize, seed: u64, exec: Execution, per_sample: F) -> Vec<WidthEstimate>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let partial = exec.map(blocks, |b| {
        let count = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
        let mut rng: ChaCha8Rng = stream(seed, b as u64, Purpose::WidthSamples);
        let mut g = vec![0.0; n];
        let mut out = vec![0.0; k];
        let mut acc = vec![Moments::default(); k];
        for _ in 0..count {
            fill_standard_normal(&mut rng, &mut g);
            per_sample(&g, &mut out);
            for (a, v) in acc.iter_mut().zip(&out) {
                a.push(*v);
            }
        }
        acc
    });
    (0..k)
        .map(|i| {
            partial
                .iter()
                .fold(Moments::default(), |m, block| m.merge(block[i]))
                .estimate()
        })
        .collect()
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    Ok(())
}

/// Inclusive 0-based ranges of support windows in `R^n`.
fn window_ranges(windows: &[ConvexSetDescriptor], n: usize) -> Result<Vec<(usize, usize)>> {
    if windows.is_empty() {
        return Err(Error::invalid("width estimation needs at least one window"));
    }
    windows
        .iter()
        .map(|w| match w {
            ConvexSetDescriptor::SupportWindow { start, width } => {
                w.validate(n)?;
                Ok((start - 1, start - 1 + width))
            }
            other => Err(Error::invalid(format!("expected a support window, got {other:?}"))),
        })
        .collect()
}

fn prefix_squares(g: &[f64], prefix: &mut Vec<f64>) {
    prefix.clear();
    prefix.push(0.0);
    let mut s = 0.0;
    for v in g {
        s += v * v;
        prefix.push(s);
    }
}

/// Width of the union of window subspaces intersected with the unit ball:
/// per sample, `max_i ‖g_{W_i}‖₂`.
pub fn width_support_union(
    windows: &[ConvexSetDescriptor],
    n: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<WidthEstimate> {
    check_samples(samples)?;
    let ranges = window_ranges(windows, n)?;
    let est = monte_carlo(n, 1, samples, seed, exec, |g, out| {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix_squares(g, &mut prefix);
        out[0] = ranges
            .iter()
            .map(|&(lo, hi)| prefix[hi + 1] - prefix[lo])
            .fold(0.0, f64::max)
            .sqrt();
    });
    Ok(est[0])
}

/// Width estimate of one difference cone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWidth {
    pub i: usize,
    pub j: usize,
    pub estimate: WidthEstimate,
}

/// Widths of the difference cones of every window pair `i ≤ j`. For windows
/// the cone lies in the span of `W_i ∪ W_j`, so each sample contributes
/// `‖g_{W_i ∪ W_j}‖₂`. All pairs share the same Gaussian draws.
pub fn width_difference_cones(
    windows: &[ConvexSetDescriptor],
    n: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<PairWidth>> {
    check_samples(samples)?;
    let ranges = window_ranges(windows, n)?;
    let pairs: Vec<(usize, usize)> = (0..ranges.len())
        .flat_map(|i| (i..ranges.len()).map(move |j| (i, j)))
        .collect();
    let est = monte_carlo(n, pairs.len(), samples, seed, exec, |g, out| {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix_squares(g, &mut prefix);
        let sum = |lo: usize, hi: usize| prefix[hi + 1] - prefix[lo];
        for (o, &(i, j)) in out.iter_mut().zip(&pairs) {
            let (a, b) = (ranges[i], ranges[j]);
            let s = if a.0 <= b.1 + 1 && b.0 <= a.1 + 1 {
                sum(a.0.min(b.0), a.1.max(b.1))
            } else {
                sum(a.0, a.1) + sum(b.0, b.1)
            };
            *o = s.sqrt();
        }
    });
    Ok(pairs
        .into_iter()
        .zip(est)
        .map(|((i, j), estimate)| PairWidth { i, j, estimate })
        .collect())
}

/// `min_{t ≥ 0} dist(g, t ∂‖x‖₁)`, where the subdifferential is `sign(x_j)`
/// on the support and `[-1, 1]` elsewhere. The squared distance is convex in
/// `t` and minimized in `[0, max_j |g_j|]`; golden-section search to 1e-8.
pub fn tangent_cone_distance(g: &[f64], x_ref: &[f64]) -> f64 {
    let dist_sq = |t: f64| -> f64 {
        g.iter()
            .zip(x_ref)
            .map(|(&gj, &xj)| {
                if xj > 0.0 {
                    (gj - t).powi(2)
                } else if xj < 0.0 {
                    (gj + t).powi(2)
                } else {
                    (gj.abs() - t).max(0.0).powi(2)
                }
            })
            .sum()
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, g.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (dist_sq(c), dist_sq(d));
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = dist_sq(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = dist_sq(d);
        }
    }
    let best = dist_sq(0.5 * (a + b)).min(dist_sq(0.0)).min(fc).min(fd);
    best.max(0.0).sqrt()
}

/// Upper estimate of the width of the ℓ1 tangent cone at `x_ref` intersected
/// with the unit sphere, via the distance to the scaled subdifferential.
pub fn width_tangent_cone(x_ref: &[f64], samples: usize, seed: u64, exec: Execution) -> Result<WidthEstimate> {
    check_samples(samples)?;
    if x_ref.iter().all(|v| *v == 0.0) {
        return Err(Error::invalid("tangent cone width needs a nonzero reference point"));
    }
    if x_ref.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("reference point must be finite"));
    }
    let est = monte_carlo(x_ref.len(), 1, samples, seed, exec, |g, out| {
        out[0] = tangent_cone_distance(g, x_ref);
    });
    Ok(est[0])
}

/// Projected-gradient-ascent steps per set and sample in [`width_general_union`].
pub const ASCENT_STEPS: usize = 500;

/// Width of a union of arbitrary convex sets intersected with the unit ball.
///
/// Per sample, `sup ⟨g, x⟩` over each `C_i ∩ B` is approximated by
/// [`ASCENT_STEPS`] projected-gradient-ascent steps from the origin, with the
/// projection onto the intersection computed by alternating projections. The
/// sets should meet the unit ball; otherwise the ascent tracks the nearest
/// point of `C_i` instead. Slow compared with [`width_support_union`].
pub fn width_general_union(
    sets: &[ConvexSetDescriptor],
    n: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<WidthEstimate> {
    check_samples(samples)?;
    if sets.is_empty() {
        return Err(Error::invalid("width estimation needs at least one set"));
    }
    for s in sets {
        s.validate(n)?;
    }
    let clipped: Vec<ConvexSetDescriptor> = sets
        .iter()
        .map(|s| ConvexSetDescriptor::Intersection {
            parts: vec![
                s.clone(),
                ConvexSetDescriptor::Ball { center: Vector::zeros(n), radius: 1.0 },
            ],
        })
        .collect();
    let est = monte_carlo(n, 1, samples, seed, exec, |g, out| {
        let mut best = f64::NEG_INFINITY;
        for set in &clipped {
            let mut x = vec![0.0; n];
            for _ in 0..ASCENT_STEPS {
                let moved: Vec<f64> = x.iter().zip(g).map(|(a, b)| a + b).collect();
                let next = project_set(set, &moved).expect("dimension checked");
                let change = dist2_sq(&next, &x);
                x = next;
                if change <= 1e-24 {
                    break;
                }
            }
            best = best.max(dot(g, &x));
        }
        out[0] = best;
    });
    Ok(est[0])
}

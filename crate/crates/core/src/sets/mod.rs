//! Convex set descriptors: Euclidean projection, smooth penalty surrogates and
//! their smoothness constants, membership, and projection onto a union.

mod build;
mod ext_real;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist2_sq, dot, norm2, Vector};

pub use build::{
    phase_retrieval_branches, quantize, quantized_cells, support_windows, uniform_quantizer_edges,
    DEFAULT_MAX_PHASE_ROWS,
};

/// Sweeps and stopping threshold for Dykstra's method on intersections.
pub const DYKSTRA_SWEEPS: usize = 200;
pub const DYKSTRA_TOL: f64 = 1e-10;

/// One convex set `C_i`.
///
/// `SupportWindow` uses 1-based coordinates and covers `start ..= start + width`
/// (so `width + 1` coordinates); everything outside is forced to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSetDescriptor {
    SupportWindow {
        start: usize,
        width: usize,
    },
    /// `{x : ⟨a, x⟩ = b}`
    AffineSlice { a: Vector, b: f64 },
    /// `{x : ⟨a, x⟩ ≤ b}`
    Halfspace { a: Vector, b: f64 },
    /// `{x : lower ≤ ⟨a, x⟩ ≤ upper}`, a quantization cell.
    Slab {
        a: Vector,
        #[serde(with = "ext_real")]
        lower: f64,
        #[serde(with = "ext_real")]
        upper: f64,
    },
    Box {
        #[serde(with = "ext_real::vec")]
        lower: Vec<f64>,
        #[serde(with = "ext_real::vec")]
        upper: Vec<f64>,
    },
    Ball { center: Vector, radius: f64 },
    /// Intersection of the parts, projected with Dykstra's method.
    Intersection { parts: Vec<ConvexSetDescriptor> },
}

/// Stiffness of the penalty surrogates `h_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub scale: f64,
}

impl PenaltyConfig {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::invalid(format!("penalty scale must be positive, got {scale}")));
        }
        Ok(PenaltyConfig { scale })
    }
}

impl ConvexSetDescriptor {
    /// The whole space `R^n`, as an unbounded box.
    pub fn whole_space(n: usize) -> Self {
        ConvexSetDescriptor::Box {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    fn is_whole_space(&self) -> bool {
        match self {
            ConvexSetDescriptor::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .all(|(l, u)| *l == f64::NEG_INFINITY && *u == f64::INFINITY),
            _ => false,
        }
    }

    /// Checks the descriptor's invariants in ambient dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        use ConvexSetDescriptor::*;
        match self {
            SupportWindow { start, width } => {
                if *start < 1 || start + width > n {
                    return Err(Error::invalid(format!(
                        "support window {start}..={} does not fit in 1..={n}",
                        start + width
                    )));
                }
            }
            AffineSlice { a, b } | Halfspace { a, b } => {
                check_dim("set normal vector", n, a.len())?;
                if norm2(a) == 0.0 {
                    return Err(Error::invalid("set normal vector must be nonzero"));
                }
                if !b.is_finite() {
                    return Err(Error::invalid("set offset must be finite"));
                }
            }
            Slab { a, lower, upper } => {
                check_dim("slab normal vector", n, a.len())?;
                if norm2(a) == 0.0 {
                    return Err(Error::invalid("slab normal vector must be nonzero"));
                }
                if lower.is_nan() || upper.is_nan() || lower > upper || *lower == f64::INFINITY
                    || *upper == f64::NEG_INFINITY
                {
                    return Err(Error::invalid(format!("empty slab [{lower}, {upper}]")));
                }
            }
            Box { lower, upper } => {
                check_dim("box lower bounds", n, lower.len())?;
                check_dim("box upper bounds", n, upper.len())?;
                for (j, (l, u)) in lower.iter().zip(upper).enumerate() {
                    if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY
                        || *u == f64::NEG_INFINITY
                    {
                        return Err(Error::invalid(format!("box coordinate {j} has empty range [{l}, {u}]")));
                    }
                }
            }
            Ball { center, radius } => {
                check_dim("ball center", n, center.len())?;
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
                }
            }
            Intersection { parts } => {
                if parts.is_empty() {
                    return Err(Error::invalid("intersection needs at least one part"));
                }
                for p in parts {
                    p.validate(n)?;
                }
            }
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        use ConvexSetDescriptor::*;
        match self {
            SupportWindow { start, width } => {
                if *start < 1 || start + width > x.len() {
                    return Err(Error::DimensionMismatch {
                        context: "support window extent",
                        expected: start + width,
                        actual: x.len(),
                    });
                }
                Ok(())
            }
            AffineSlice { a, .. } | Halfspace { a, .. } | Slab { a, .. } => {
                check_dim("point vs set normal", a.len(), x.len())
            }
            Box { lower, .. } => check_dim("point vs box", lower.len(), x.len()),
            Ball { center, .. } => check_dim("point vs ball", center.len(), x.len()),
            Intersection { parts } => parts.iter().try_for_each(|p| p.check_point(x)),
        }
    }

    /// Euclidean projection; caller has checked dimensions.
    fn project_unchecked(&self, x: &[f64]) -> Vec<f64> {
        use ConvexSetDescriptor::*;
        match self {
            SupportWindow { start, width } => {
                let (lo, hi) = (start - 1, start - 1 + width);
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| if j >= lo && j <= hi { v } else { 0.0 })
                    .collect()
            }
            AffineSlice { a, b } => shift_along(x, a, dot(a, x) - b),
            Halfspace { a, b } => {
                let excess = dot(a, x) - b;
                if excess > 0.0 {
                    shift_along(x, a, excess)
                } else {
                    x.to_vec()
                }
            }
            Slab { a, lower, upper } => {
                let s = dot(a, x);
                if s > *upper {
                    shift_along(x, a, s - upper)
                } else if s < *lower {
                    shift_along(x, a, s - lower)
                } else {
                    x.to_vec()
                }
            }
            Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &u))| v.max(l).min(u))
                .collect(),
            Ball { center, radius } => {
                let d = dist2_sq(x, center).sqrt();
                if d <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / d;
                    x.iter().zip(center.iter()).map(|(&v, &c)| c + s * (v - c)).collect()
                }
            }
            Intersection { parts } => dykstra(parts, x),
        }
    }

    fn penalty_unchecked(&self, cfg: PenaltyConfig, x: &[f64]) -> f64 {
        match self {
            ConvexSetDescriptor::SupportWindow { .. } => {
                let p = self.project_unchecked(x);
                cfg.scale * dist2_sq(x, &p)
            }
            _ => 0.5 * cfg.scale * dist2_sq(x, &self.project_unchecked(x)),
        }
    }

    /// Penalty value and gradient sharing one projection.
    pub(crate) fn penalty_and_grad(&self, cfg: PenaltyConfig, x: &[f64]) -> (f64, Vec<f64>) {
        let proj = self.project_unchecked(x);
        let diff: Vec<f64> = x.iter().zip(&proj).map(|(a, b)| a - b).collect();
        let sq = dot(&diff, &diff);
        match self {
            ConvexSetDescriptor::SupportWindow { .. } => (
                cfg.scale * sq,
                diff.into_iter().map(|d| 2.0 * cfg.scale * d).collect(),
            ),
            _ => (
                0.5 * cfg.scale * sq,
                diff.into_iter().map(|d| cfg.scale * d).collect(),
            ),
        }
    }

    /// Upper bound on the penalty over the ball `‖x‖₂ ≤ r`.
    pub(crate) fn penalty_bound(&self, cfg: PenaltyConfig, r: f64) -> f64 {
        match self {
            ConvexSetDescriptor::SupportWindow { .. } => cfg.scale * r * r,
            _ if self.is_whole_space() => 0.0,
            _ => {
                let n = self.ambient_dim().unwrap_or(0);
                let origin_gap = norm2(&self.project_unchecked(&vec![0.0; n]));
                0.5 * cfg.scale * (r + origin_gap).powi(2)
            }
        }
    }

    fn ambient_dim(&self) -> Option<usize> {
        use ConvexSetDescriptor::*;
        match self {
            SupportWindow { .. } => None,
            AffineSlice { a, .. } | Halfspace { a, .. } | Slab { a, .. } => Some(a.len()),
            Box { lower, .. } => Some(lower.len()),
            Ball { center, .. } => Some(center.len()),
            Intersection { parts } => parts.iter().find_map(Self::ambient_dim),
        }
    }
}

/// `x − (excess / ‖a‖²) a`
fn shift_along(x: &[f64], a: &[f64], excess: f64) -> Vec<f64> {
    let s = excess / dot(a, a);
    x.iter().zip(a).map(|(&v, &ai)| v - s * ai).collect()
}

fn dykstra(parts: &[ConvexSetDescriptor], x0: &[f64]) -> Vec<f64> {
    if parts.len() == 1 {
        return parts[0].project_unchecked(x0);
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut increments = vec![vec![0.0; n]; parts.len()];
    for _ in 0..DYKSTRA_SWEEPS {
        let start = x.clone();
        for (part, inc) in parts.iter().zip(increments.iter_mut()) {
            let shifted: Vec<f64> = x.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
            let y = part.project_unchecked(&shifted);
            for ((i, s), yv) in inc.iter_mut().zip(&shifted).zip(&y) {
                *i = s - yv;
            }
            x = y;
        }
        if dist2_sq(&x, &start).sqrt() <= DYKSTRA_TOL {
            break;
        }
    }
    x
}

/// Euclidean projection of `x` onto `set`.
pub fn project_set(set: &ConvexSetDescriptor, x: &[f64]) -> Result<Vec<f64>> {
    set.check_point(x)?;
    Ok(set.project_unchecked(x))
}

/// Smooth surrogate `h_i(x)` of the set indicator, zero exactly on the set.
///
/// Support windows use `c Σ_{j∉W} x_j²`; every other set uses
/// `(c/2) dist²(x, C)`.
pub fn penalty(set: &ConvexSetDescriptor, cfg: PenaltyConfig, x: &[f64]) -> Result<f64> {
    set.check_point(x)?;
    Ok(set.penalty_unchecked(cfg, x))
}

pub fn penalty_grad(set: &ConvexSetDescriptor, cfg: PenaltyConfig, x: &[f64]) -> Result<Vec<f64>> {
    set.check_point(x)?;
    Ok(set.penalty_and_grad(cfg, x).1)
}

/// A gradient-Lipschitz constant of the penalty: `2c` for support windows,
/// `c` for distance-squared penalties, and 0 for the unbounded box, whose
/// penalty vanishes identically.
pub fn smoothness_constant(set: &ConvexSetDescriptor, cfg: PenaltyConfig) -> f64 {
    match set {
        ConvexSetDescriptor::SupportWindow { .. } => 2.0 * cfg.scale,
        s if s.is_whole_space() => 0.0,
        _ => cfg.scale,
    }
}

/// `dist(x, set) ≤ tol`
pub fn contains(set: &ConvexSetDescriptor, x: &[f64], tol: f64) -> Result<bool> {
    let p = project_set(set, x)?;
    Ok(dist2_sq(x, &p).sqrt() <= tol)
}

/// Projection onto the nearest set of the union; ties go to the smallest index.
pub fn project_union(sets: &[ConvexSetDescriptor], x: &[f64]) -> Result<(Vec<f64>, usize)> {
    if sets.is_empty() {
        return Err(Error::invalid("projection onto an empty union"));
    }
    let mut best: Option<(Vec<f64>, usize, f64)> = None;
    for (i, s) in sets.iter().enumerate() {
        let p = project_set(s, x)?;
        let d = dist2_sq(x, &p);
        if best.as_ref().map_or(true, |(_, _, bd)| d < *bd) {
            best = Some((p, i, d));
        }
    }
    let (p, i, _) = best.expect("nonempty union");
    Ok((p, i))
}

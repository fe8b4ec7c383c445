//! Constructors for the set families used by the reductions: sliding support
//! windows, quantization cells and phase-retrieval sign branches.

use super::ConvexSetDescriptor;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Row-count guard for `phase_retrieval_branches`.
pub const DEFAULT_MAX_PHASE_ROWS: usize = 10;

/// The `n - k` windows `{start ..= start + k}` for `start = 1 ..= n - k`,
/// each holding `k + 1` coordinates.
pub fn support_windows(n: usize, k: usize) -> Result<Vec<ConvexSetDescriptor>> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("window width {k} must satisfy 1 <= k < n = {n}")));
    }
    Ok((1..=n - k)
        .map(|start| ConvexSetDescriptor::SupportWindow { start, width: k })
        .collect())
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::invalid("a quantizer needs at least two edges"));
    }
    if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("quantizer edges must be strictly increasing"));
    }
    Ok(())
}

/// Edges of a `bits`-bit uniform quantizer on `[lo, hi]` whose outer cells
/// extend to ±∞: `(-∞, lo + Δ, ..., hi - Δ, ∞)` with `2^bits` cells.
pub fn uniform_quantizer_edges(bits: u32, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if bits == 0 || bits > 20 {
        return Err(Error::invalid(format!("quantizer bit depth {bits} outside 1..=20")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("quantizer range [{lo}, {hi}] is empty")));
    }
    let cells = 1usize << bits;
    let step = (hi - lo) / cells as f64;
    let mut edges = Vec::with_capacity(cells + 1);
    edges.push(f64::NEG_INFINITY);
    edges.extend((1..cells).map(|k| lo + k as f64 * step));
    edges.push(f64::INFINITY);
    Ok(edges)
}

/// Index of the cell `[edges[k], edges[k+1])` holding `value`.
pub fn quantize(edges: &[f64], value: f64) -> Result<usize> {
    check_edges(edges)?;
    if value.is_nan() || value < edges[0] || value > edges[edges.len() - 1] {
        return Err(Error::invalid(format!("value {value} lies outside the quantizer range")));
    }
    let k = edges.partition_point(|e| *e <= value);
    Ok(k.saturating_sub(1).min(edges.len() - 2))
}

/// One slab `{x : edges[y_i] ≤ ⟨a_i, x⟩ ≤ edges[y_i + 1]}` per measurement,
/// where `y_i` is the cell index reported by the quantizer.
pub fn quantized_cells(a_rows: &Matrix, y: &[f64], edges: &[f64]) -> Result<Vec<ConvexSetDescriptor>> {
    check_edges(edges)?;
    if y.len() != a_rows.rows() {
        return Err(Error::DimensionMismatch {
            context: "quantized measurements vs rows",
            expected: a_rows.rows(),
            actual: y.len(),
        });
    }
    let cells = edges.len() - 1;
    y.iter()
        .enumerate()
        .map(|(i, &level)| {
            if level.fract() != 0.0 || level < 0.0 || level >= cells as f64 {
                return Err(Error::invalid(format!(
                    "measurement {i} has level {level}, not a cell index in 0..{cells}"
                )));
            }
            let k = level as usize;
            let a = Vector::new(a_rows.row(i).to_vec())?;
            if crate::linalg::norm2(&a) == 0.0 {
                return Err(Error::invalid(format!("measurement row {i} is zero")));
            }
            Ok(ConvexSetDescriptor::Slab { a, lower: edges[k], upper: edges[k + 1] })
        })
        .collect()
}

/// All sign branches of the magnitude measurements `y_i = |⟨a_i, x⟩|²`.
///
/// Branch `b` sets `⟨a_i, x⟩ = s_i √y_i` with `s_i = -1` when bit `j` of `b`
/// is set, `j` counting only rows with `y_i > 0`; rows with `y_i = 0` give a
/// single constraint, so `2^(#nonzero rows)` branches are returned.
pub fn phase_retrieval_branches(
    a_rows: &Matrix,
    y: &[f64],
    max_rows: usize,
) -> Result<Vec<ConvexSetDescriptor>> {
    let l = a_rows.rows();
    if y.len() != l {
        return Err(Error::DimensionMismatch {
            context: "magnitude measurements vs rows",
            expected: l,
            actual: y.len(),
        });
    }
    if l > max_rows {
        return Err(Error::Capacity(format!(
            "{l} magnitude measurements would need 2^{l} branches; the limit is {max_rows} rows"
        )));
    }
    if let Some(i) = y.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("magnitude measurement {i} is negative or not finite")));
    }
    let mut rows = Vec::with_capacity(l);
    for i in 0..l {
        let a = Vector::new(a_rows.row(i).to_vec())?;
        if crate::linalg::norm2(&a) == 0.0 {
            return Err(Error::invalid(format!("measurement row {i} is zero")));
        }
        rows.push((a, y[i].sqrt()));
    }
    let signed = rows.iter().filter(|(_, r)| *r > 0.0).count();
    let branches = (0..1usize << signed)
        .map(|mask| {
            let mut bit = 0;
            let mut parts: Vec<ConvexSetDescriptor> = rows
                .iter()
                .map(|(a, r)| {
                    let b = if *r > 0.0 {
                        let s = if mask >> bit & 1 == 1 { -r } else { *r };
                        bit += 1;
                        s
                    } else {
                        0.0
                    };
                    ConvexSetDescriptor::AffineSlice { a: a.clone(), b }
                })
                .collect();
            if parts.len() == 1 {
                parts.pop().expect("one part")
            } else {
                ConvexSetDescriptor::Intersection { parts }
            }
        })
        .collect();
    Ok(branches)
}

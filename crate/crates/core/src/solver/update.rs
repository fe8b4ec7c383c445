use crate::error::{check_dim, Error, Result};
use crate::simplex::{project_simplex, SimplexPoint};

/// Multiplicative-weights step `p_i ∝ p_i exp(−η f_i)`.
///
/// Losses are shifted by their minimum before exponentiating, so the result
/// is invariant under constant shifts of `f` and cannot overflow. Weights that
/// would underflow are floored at the smallest positive normal number, which
/// keeps every weight strictly positive.
pub fn mw_update_p(p: &SimplexPoint, f: &[f64], eta_p: f64) -> Result<SimplexPoint> {
    check_dim("losses vs weights", p.len(), f.len())?;
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("loss {i} is not finite")));
    }
    if !(eta_p >= 0.0) || !eta_p.is_finite() {
        return Err(Error::invalid(format!("eta_p must be nonnegative, got {eta_p}")));
    }
    if p.weights().iter().any(|w| *w <= 0.0) {
        return Err(Error::invalid("multiplicative weights need strictly positive weights"));
    }
    Ok(mw_step(p.weights(), f, eta_p))
}

pub(crate) fn mw_step(p: &[f64], f: &[f64], eta_p: f64) -> SimplexPoint {
    let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = p
        .iter()
        .zip(f)
        .map(|(pi, fi)| (pi * (-eta_p * (fi - fmin)).exp()).max(f64::MIN_POSITIVE))
        .collect();
    SimplexPoint::normalized(w)
}

/// Projected gradient step `Proj_Δ(p − η (f + λ3 (p − q)))`.
pub fn regularized_update_p(
    p: &SimplexPoint,
    f: &[f64],
    q: &SimplexPoint,
    lambda3: f64,
    eta_p: f64,
) -> Result<SimplexPoint> {
    check_dim("losses vs weights", p.len(), f.len())?;
    check_dim("prior vs weights", p.len(), q.len())?;
    if !(lambda3 > 0.0) || !lambda3.is_finite() {
        return Err(Error::invalid(format!("lambda3 must be positive on the regularized path, got {lambda3}")));
    }
    if !(eta_p >= 0.0) || !eta_p.is_finite() {
        return Err(Error::invalid(format!("eta_p must be nonnegative, got {eta_p}")));
    }
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("loss {i} is not finite")));
    }
    regularized_step(p.weights(), f, q.weights(), lambda3, eta_p)
}

pub(crate) fn regularized_step(p: &[f64], f: &[f64], q: &[f64], lambda3: f64, eta_p: f64) -> Result<SimplexPoint> {
    if eta_p == 0.0 {
        return Ok(SimplexPoint::normalized(p.to_vec()));
    }
    let v: Vec<f64> = p
        .iter()
        .zip(f)
        .zip(q)
        .map(|((pi, fi), qi)| pi - eta_p * (fi + lambda3 * (pi - qi)))
        .collect();
    project_simplex(&v)
}

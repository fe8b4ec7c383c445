//! The expected Euclidean norm of a standard Gaussian vector.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Half-dimension above which the asymptotic series replaces log-gamma.
const SERIES_CUTOVER: f64 = 5.0e4;

/// `a_M = 𝔼‖g‖₂` for `g ~ N(0, I_M)`, i.e. `√2 Γ((M+1)/2) / Γ(M/2)`.
///
/// Uses a log-gamma difference for moderate `M`. For very large `M` the two
/// log-gamma values are huge and nearly equal, so the ratio is taken from its
/// asymptotic expansion instead (relative truncation error below 1e-20 there).
pub fn expected_gauss_norm(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("expected Gaussian norm needs dimension M >= 1"));
    }
    let half = m as f64 / 2.0;
    if half < SERIES_CUTOVER {
        Ok(std::f64::consts::SQRT_2 * (ln_gamma(half + 0.5) - ln_gamma(half)).exp())
    } else {
        Ok((m as f64).sqrt() * gamma_half_ratio_series(half))
    }
}

/// `Γ(x + ½) / (√x Γ(x))` for large `x`.
fn gamma_half_ratio_series(x: f64) -> f64 {
    let u = 1.0 / x;
    1.0 + u * (-1.0 / 8.0 + u * (1.0 / 128.0 + u * (5.0 / 1024.0 + u * (-21.0 / 32768.0))))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::expected_gauss_norm;

/// Largest measurement count `min_measurements` will consider.
pub const MAX_MEASUREMENTS: u64 = 1 << 32;

/// Lower bound on the probability that the union-constrained program recovers
/// the signal uniquely, with its ingredients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "a_M")]
    pub a_m: f64,
    pub omega_t: f64,
    #[serde(rename = "omega_Cij")]
    pub omega_pairs: Vec<f64>,
    pub epsilon: f64,
    pub p1_bound: f64,
    pub p2_bound: f64,
    #[serde(rename = "pr_E_lower")]
    pub pr_e_lower: f64,
}

/// Smallest measurement counts reaching a target probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMeasurements {
    /// Using both bounds (the union prior is exploited).
    pub constrained: u64,
    /// Using the tangent-cone bound alone.
    pub unconstrained: u64,
}

impl MinMeasurements {
    /// Measurements saved by the union prior.
    pub fn savings(&self) -> i64 {
        self.unconstrained as i64 - self.constrained as i64
    }
}

/// `1` if `a_m < omega_t`, else `min(1, exp(-(a_m - omega_t)²/2))`.
pub fn p1_bound(a_m: f64, omega_t: f64) -> f64 {
    if !(a_m >= omega_t) {
        return 1.0;
    }
    let d = a_m - omega_t;
    (-d * d / 2.0).exp().min(1.0)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    Ok(())
}

/// `1` if `(1-2ε)a_m < ω_ij` for some pair, else
/// `min(1, 1.5·exp(-ε²a_m²/2) + Σ exp(-((1-2ε)a_m - ω_ij)²/2))`.
pub fn p2_bound(a_m: f64, omega_pairs: &[f64], epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let shrunk = (1.0 - 2.0 * epsilon) * a_m;
    if omega_pairs.iter().any(|w| !(shrunk >= *w)) {
        return Ok(1.0);
    }
    let mut total = 1.5 * (-epsilon * epsilon * a_m * a_m / 2.0).exp();
    for w in omega_pairs {
        let d = shrunk - w;
        total += (-d * d / 2.0).exp();
        if total >= 1.0 {
            return Ok(1.0);
        }
    }
    Ok(total.min(1.0))
}

/// Assembles `a_M`, both bounds and `1 - min(P1, P2)`.
pub fn uniqueness_lower_bound(m: u64, omega_t: f64, omega_pairs: &[f64], epsilon: f64) -> Result<BoundReport> {
    if m == 0 {
        return Err(Error::invalid("measurement count must be positive"));
    }
    let a_m = expected_gauss_norm(m)?;
    let p1 = p1_bound(a_m, omega_t);
    let p2 = p2_bound(a_m, omega_pairs, epsilon)?;
    Ok(BoundReport {
        m,
        a_m,
        omega_t,
        omega_pairs: omega_pairs.to_vec(),
        epsilon,
        p1_bound: p1,
        p2_bound: p2,
        pr_e_lower: 1.0 - p1.min(p2),
    })
}

/// Smallest `m` with `reaches(m)`, assuming `reaches` is monotone in `m`.
fn smallest<F>(mut reaches: F) -> Result<u64>
where
    F: FnMut(u64) -> Result<bool>,
{
    let mut hi = 1u64;
    while !reaches(hi)? {
        if hi >= MAX_MEASUREMENTS {
            return Err(Error::Capacity(format!(
                "target probability not reached with {MAX_MEASUREMENTS} measurements"
            )));
        }
        hi = (hi * 2).min(MAX_MEASUREMENTS);
    }
    let mut lo = hi / 2; // fails, or 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `M` whose guaranteed success probability reaches `target`, with
/// and without the union prior.
pub fn min_measurements(omega_t: f64, omega_pairs: &[f64], epsilon: f64, target: f64) -> Result<MinMeasurements> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!("target must lie in (0, 1), got {target}")));
    }
    check_epsilon(epsilon)?;
    let constrained = smallest(|m| Ok(uniqueness_lower_bound(m, omega_t, omega_pairs, epsilon)?.pr_e_lower >= target))?;
    let unconstrained = smallest(|m| Ok(1.0 - p1_bound(expected_gauss_norm(m)?, omega_t) >= target))?;
    Ok(MinMeasurements { constrained, unconstrained })
}

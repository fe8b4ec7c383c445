//! Proximal operator of the scaled ℓ1 norm.

use crate::error::{Error, Result};

/// `argmin_z τ‖z‖₁ + ½‖z − v‖²`, i.e. componentwise shrinkage toward zero.
pub fn soft_threshold(v: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!(
            "soft-threshold level must be finite and nonnegative, got {tau}"
        )));
    }
    let mut out = v.to_vec();
    soft_threshold_in_place(&mut out, tau);
    Ok(out)
}

pub(crate) fn soft_threshold_in_place(v: &mut [f64], tau: f64) {
    for x in v.iter_mut() {
        let mag = x.abs() - tau;
        *x = if mag > 0.0 { mag.copysign(*x) } else { 0.0 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinks_componentwise() {
        assert_eq!(soft_threshold(&[3.0, -0.5, 0.0], 1.0).unwrap(), vec![2.0, 0.0, 0.0]);
        assert_eq!(soft_threshold(&[-3.0, 1.5], 1.0).unwrap(), vec![-2.0, 0.5]);
    }

    #[test]
    fn zero_level_is_identity() {
        let v = [1.25, -7.0, 0.0, 3e-9];
        assert_eq!(soft_threshold(&v, 0.0).unwrap(), v.to_vec());
    }

    #[test]
    fn negative_level_rejected() {
        let err = soft_threshold(&[1.0], -0.1).unwrap_err();
        assert!(err.is_invalid_argument());
        assert!(soft_threshold(&[1.0], f64::NAN).is_err());
    }
}

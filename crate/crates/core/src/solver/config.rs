use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::SimplexPoint;

/// Step-size rule for the weights `p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PSchedule {
    /// `η = R⁻¹ √(2 ln L / T)` for a known horizon `T`.
    #[default]
    FixedHorizon,
    /// Epochs of length 1, 2, 4, …, each run with the fixed-horizon step for
    /// its own length; the weights restart from uniform at every epoch.
    Doubling,
    /// `η_t = 1 / (λ3 t)`; needs `λ3 > 0`.
    InverseT,
    /// `η_t = η0 / t²` with `η0 = R⁻¹ √(2 ln L)` unless overridden.
    InverseTSquared,
}

/// Step size for the signal update.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum StepSize {
    /// `1 / L_h`.
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for StepSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StepSize::Auto => s.serialize_str("auto"),
            StepSize::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for StepSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(StepSize::Fixed(v)),
            Repr::Text(s) if s == "auto" => Ok(StepSize::Auto),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", got {s:?}"
            ))),
        }
    }
}

fn one() -> f64 {
    1.0
}

/// Multipliers, horizon and step-size rules for one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Data-fit weight `λ1`.
    pub lambda1: f64,
    /// Energy weight `λ2`.
    pub lambda2: f64,
    /// Weight of `(λ3/2)‖p − q‖²`; zero selects the multiplicative-weights path.
    #[serde(default)]
    pub lambda3: f64,
    /// Radius `R` of the ball the iterates are kept in.
    #[serde(alias = "radius_R")]
    pub radius: f64,
    /// Number of iterations `T`.
    #[serde(alias = "horizon_T")]
    pub horizon: usize,
    #[serde(default)]
    pub eta_x: StepSize,
    #[serde(default)]
    pub p_schedule: PSchedule,
    /// Multiplier applied to every scheduled `η_p`.
    #[serde(default = "one")]
    pub eta_p_scale: f64,
    /// Overrides `η0` of the inverse-t-squared schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_p0: Option<f64>,
    /// Prior `q` of the regularized path; required exactly when `λ3 > 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_q: Option<SimplexPoint>,
    /// Penalty stiffness `c`; defaults to `10 λ1 ‖A‖²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_scale: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Stop once `‖x⁺ − x‖ ≤ stop_tol` for 10 consecutive iterations; 0 runs
    /// the full horizon.
    #[serde(default)]
    pub stop_tol: f64,
}

/// Consecutive small steps needed for early stopping.
pub const STOP_PATIENCE: usize = 10;

impl SolverConfig {
    pub fn new(lambda1: f64, lambda2: f64, radius: f64, horizon: usize) -> Self {
        SolverConfig {
            lambda1,
            lambda2,
            lambda3: 0.0,
            radius,
            horizon,
            eta_x: StepSize::Auto,
            p_schedule: PSchedule::FixedHorizon,
            eta_p_scale: 1.0,
            eta_p0: None,
            prior_q: None,
            penalty_scale: None,
            seed: 0,
            stop_tol: 0.0,
        }
    }

    /// Switches to the regularized path with prior `q`.
    pub fn regularized(mut self, lambda3: f64, q: SimplexPoint) -> Self {
        self.lambda3 = lambda3;
        self.prior_q = Some(q);
        self
    }

    pub fn with_schedule(mut self, s: PSchedule) -> Self {
        self.p_schedule = s;
        self
    }

    pub fn is_regularized(&self) -> bool {
        self.lambda3 > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos("lambda1", self.lambda1)?;
        pos("lambda2", self.lambda2)?;
        pos("radius", self.radius)?;
        pos("eta_p_scale", self.eta_p_scale)?;
        if !(self.lambda3 >= 0.0) || !self.lambda3.is_finite() {
            return Err(Error::invalid(format!("lambda3 must be nonnegative, got {}", self.lambda3)));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        if let StepSize::Fixed(v) = self.eta_x {
            pos("eta_x", v)?;
        }
        if let Some(v) = self.eta_p0 {
            pos("eta_p0", v)?;
        }
        if let Some(v) = self.penalty_scale {
            pos("penalty_scale", v)?;
        }
        if !(self.stop_tol >= 0.0) {
            return Err(Error::invalid("stop_tol must be nonnegative"));
        }
        if self.p_schedule == PSchedule::InverseT && !self.is_regularized() {
            return Err(Error::invalid("the inverse-t schedule needs lambda3 > 0"));
        }
        match (self.is_regularized(), &self.prior_q) {
            (true, None) => Err(Error::invalid("lambda3 > 0 needs a prior_q")),
            (false, Some(_)) => Err(Error::invalid("prior_q is only used when lambda3 > 0")),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_aliases() {
        let c: SolverConfig =
            serde_json::from_str(r#"{"lambda1": 10, "lambda2": 0.001, "radius_R": 2, "horizon_T": 50}"#).unwrap();
        assert_eq!(c, SolverConfig::new(10.0, 1e-3, 2.0, 50));
        let d: SolverConfig = serde_json::from_str(
            r#"{"lambda1": 1, "lambda2": 1, "radius": 1, "horizon": 5, "eta_x": 0.5, "p_schedule": "inverse-t-squared"}"#,
        )
        .unwrap();
        assert_eq!(d.eta_x, StepSize::Fixed(0.5));
        assert_eq!(d.p_schedule, PSchedule::InverseTSquared);
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<SolverConfig>(&text).unwrap(), d);
    }

    #[test]
    fn validation_rules() {
        assert!(SolverConfig::new(1.0, 1.0, 1.0, 0).validate().is_err());
        assert!(SolverConfig::new(0.0, 1.0, 1.0, 1).validate().is_err());
        let inv = SolverConfig::new(1.0, 1.0, 1.0, 1).with_schedule(PSchedule::InverseT);
        assert!(inv.validate().is_err());
        let q = SimplexPoint::uniform(2).unwrap();
        assert!(inv.regularized(1.0, q.clone()).validate().is_ok());
        let mut c = SolverConfig::new(1.0, 1.0, 1.0, 1);
        c.prior_q = Some(q);
        assert!(c.validate().is_err());
    }
}

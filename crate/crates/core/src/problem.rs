//! A compressive sensing instance with its union-of-sets prior.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::sets::ConvexSetDescriptor;

/// Measurements `y = A x` of a signal assumed to lie in one of `sets`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct ProblemInstance {
    pub a: Matrix,
    pub y: Vector,
    pub sets: Vec<ConvexSetDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_true: Option<Vector>,
}

#[derive(Deserialize)]
struct RawProblem {
    a: Matrix,
    y: Vector,
    sets: Vec<ConvexSetDescriptor>,
    #[serde(default)]
    x_true: Option<Vector>,
}

impl TryFrom<RawProblem> for ProblemInstance {
    type Error = Error;

    fn try_from(r: RawProblem) -> Result<Self> {
        ProblemInstance::new(r.a, r.y, r.sets, r.x_true)
    }
}

impl ProblemInstance {
    pub fn new(
        a: Matrix,
        y: Vector,
        sets: Vec<ConvexSetDescriptor>,
        x_true: Option<Vector>,
    ) -> Result<Self> {
        check_dim("measurements vs matrix rows", a.rows(), y.len())?;
        if sets.is_empty() {
            return Err(Error::invalid("a problem needs at least one set"));
        }
        for s in &sets {
            s.validate(a.cols())?;
        }
        if let Some(x) = &x_true {
            check_dim("ground truth vs matrix columns", a.cols(), x.len())?;
        }
        Ok(ProblemInstance { a, y, sets, x_true })
    }

    /// Signal dimension `N`.
    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    /// Number of measurements `M`.
    pub fn measurements(&self) -> usize {
        self.a.rows()
    }

    /// Number of sets `L`.
    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_shapes() {
        let a = Matrix::identity(2).unwrap();
        let y = Vector::new(vec![1.0]).unwrap();
        let sets = vec![ConvexSetDescriptor::whole_space(2)];
        assert!(ProblemInstance::new(a.clone(), y, sets.clone(), None).is_err());
        let y2 = Vector::new(vec![1.0, 2.0]).unwrap();
        assert!(ProblemInstance::new(a.clone(), y2.clone(), vec![], None).is_err());
        let bad = vec![ConvexSetDescriptor::SupportWindow { start: 2, width: 1 }];
        assert!(ProblemInstance::new(a, y2, bad, None).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let text = r#"{"a": [[1, 0], [0, 1]], "y": [1, 2],
            "sets": [{"kind": "support_window", "start": 1, "width": 1}]}"#;
        let p: ProblemInstance = serde_json::from_str(text).unwrap();
        assert_eq!(p.dim(), 2);
        let back: ProblemInstance = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"a": [[1, 0]], "y": [1, 2], "sets": [{"kind": "ball", "center": [0, 0], "radius": 1}]}"#;
        assert!(serde_json::from_str::<ProblemInstance>(bad).is_err());
    }
}

//! Compressive sensing with a union-of-convex-sets prior.
//!
//! The solver alternates multiplicative-weights updates over the sets with a
//! proximal-gradient step on the signal, then projects the averaged iterate
//! onto the nearest set. `theory` evaluates Gaussian-width based measurement
//! bounds and `harness` runs seeded recovery experiments.

pub mod error;
pub mod gauss;
pub mod harness;
pub mod linalg;
pub mod par;
pub mod problem;
pub mod prox;
pub mod rng;
pub mod sets;
pub mod simplex;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
pub use gauss::expected_gauss_norm;
pub use linalg::{spectral_norm, Matrix, Vector};
pub use par::Execution;
pub use problem::ProblemInstance;
pub use prox::soft_threshold;
pub use sets::{ConvexSetDescriptor, PenaltyConfig};
pub use simplex::{project_simplex, SimplexPoint};
pub use solver::{solve, SolverConfig, SolverResult};

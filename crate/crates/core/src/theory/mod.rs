//! Gaussian widths and the probability bounds built from them.
//!
//! Widths are Monte Carlo estimates; the bounds turn them into a guaranteed
//! probability of unique recovery and into the smallest measurement count
//! reaching a target probability, with and without the union prior.

mod bounds;
mod widths;

pub use bounds::{
    min_measurements, p1_bound, p2_bound, uniqueness_lower_bound, BoundReport, MinMeasurements,
    MAX_MEASUREMENTS,
};
pub use widths::{
    tangent_cone_distance, width_difference_cones, width_general_union, width_support_union,
    width_tangent_cone, PairWidth, WidthEstimate, ASCENT_STEPS, BLOCK_SIZE, DEFAULT_WIDTH_SAMPLES,
};

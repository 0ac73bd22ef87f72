//! Envelope machinery in one effective dimension, region probing, interior
//! point search, and hyperplane bisection.

mod envelope;
mod hyperplane;
mod regions;

pub use envelope::{build_envelope, effective_lines, envelope_minimizer, Envelope1D, Segment, Transition};
pub use hyperplane::{bisect_hyperplane, solve_link, Bisection, MIN_LINK_SPREAD};
pub use regions::{
    certified_radius, find_interior_point, max_gradient_norm, probe_regions, InteriorPoint, RegionProbe,
    DEFAULT_INTERIOR_ATTEMPTS,
};

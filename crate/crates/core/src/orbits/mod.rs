//! Variational solvers: periodic orbits from codes, the marked length
//! spectrum, anchored heteroclinic segments, invariant-curve tracing,
//! and the local product bracket.

pub mod curve;
pub mod newton;
pub mod periodic;
pub mod segment;

pub use curve::{
    trace_invariant_curve, trace_invariant_curve_clamped, CurveSample, InvariantCurve, Stability,
};
pub use newton::GRADIENT_TOL;
pub use periodic::{
    marked_length_spectrum, necklaces_up_to, solve_periodic_orbit, solve_periodic_orbit_from,
    MlsEntry, MlsTable, PeriodicOrbit,
};
pub use segment::{
    cylinder_code, product_point, resolve_code, resolve_code_default, sample_trapped_points,
    solve_anchored_segment, OrbitSegment, TrappedPoint, DEFAULT_PAD,
};

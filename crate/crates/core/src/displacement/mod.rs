//! Temporal displacements of quadrilaterals, holonomies, periodic
//! approximation, and the symplectic-area identity.

pub mod holonomy;
pub mod quad;
pub mod small;

pub use holonomy::{stable_holonomy, unstable_holonomy, HolonomyValue, DEFAULT_DEPTH};
pub use quad::{
    periodic_approx_displacement, quadrilateral_area, temporal_displacement, PeriodicApproximant,
    QuadArea, Quadrilateral, TemporalDisplacement,
};
pub use small::{small_quad_asymptotics, SmallQuadReport, SmallQuadRow};

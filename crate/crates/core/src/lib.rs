//! Numerical laboratory for planar open dispersing billiards.
//!
//! The table is the plane with `l >= 3` strictly convex obstacles
//! removed. Under the non-eclipse condition the trapped set is a
//! horseshoe coded by the full shift on the obstacle alphabet minus
//! letter repetitions; this crate computes its marked length spectrum,
//! stable/unstable holonomies and temporal displacements of
//! quadrilaterals, the symplectic-area identity, Hausdorff-dimension
//! estimates, and two-table rigidity comparisons.

pub mod error;
pub mod geometry;
pub mod num;
pub(crate) mod par;
pub mod dynamics;
pub mod orbits;
pub mod displacement;
pub mod rigidity;
pub mod selftest;
pub mod symbolic;

pub use error::{Error, Result};
pub use num::{Mat2, Vec2};

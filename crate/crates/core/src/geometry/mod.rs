//! Billiard tables: strictly convex smooth obstacles with exact
//! arclength parametrization, curvature jets, isometries, and localized
//! perturbations.

pub mod curve;
pub mod eclipse;
pub mod shape;
pub mod table;

pub use curve::{BoundaryCurve, Frame, ARCLENGTH_TOL};
pub use eclipse::{check_non_eclipse, NonEclipseReport};
pub use shape::{BumpSpec, Shape, ShapeSpec, MAX_JET_ORDER};
pub use table::{
    separation_margin, tri6, tri_custom, BumpPerturbation, Isometry, Obstacle, Table, TableConfig,
};

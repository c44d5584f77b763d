//! Small numerical building blocks: planar vectors, 2x2 matrices,
//! truncated Taylor jets, and fixed-order Gauss-Legendre panels.

pub mod jet;
pub mod linalg;
pub mod quadrature;

pub use jet::Jet;
pub use linalg::{Mat2, Vec2};
pub use quadrature::gauss_legendre_20;

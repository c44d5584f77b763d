//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fewer than 3 obstacles (got {0})")]
    FewerThanThreeObstacles(usize),
    #[error("non-convex shape: curvature reaches {min_curvature:.6e} on obstacle {obstacle}")]
    NonConvexShape { obstacle: usize, min_curvature: f64 },
    #[error("overlapping obstacles {0} and {1}")]
    OverlappingObstacles(usize, usize),
    #[error("non-eclipse condition violated, first offending triple {0:?}")]
    EclipseViolated((usize, usize, usize)),
    #[error("convexity lost by perturbation on obstacle {obstacle} (min curvature {min_curvature:.6e})")]
    ConvexityLost { obstacle: usize, min_curvature: f64 },
    #[error("bump support is empty or wraps more than the full perimeter")]
    BadBumpSupport,
    #[error("jet order {requested} exceeds available smoothness {available}")]
    JetOrderUnsupported { requested: usize, available: usize },
    #[error("inadmissible word {0}")]
    InadmissibleWord(String),
    #[error("inadmissible splice at position {0}")]
    InadmissibleSplice(isize),
    #[error("window too short: {0}")]
    WindowTooShort(String),
    #[error("ray escapes the table (no obstacle hit)")]
    Escape,
    #[error("tangential collision encountered")]
    TangentialCollision,
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("non-hyperbolic monodromy (|trace| = {0:.6})")]
    NonHyperbolic(f64),
    #[error("points are not on one {0} leaf: codes disagree at offset {1}")]
    LeafMismatch(&'static str, isize),
    #[error("requested radius {requested:.3e} exceeds traceable range {reached:.3e}")]
    RadiusOutOfRange { requested: f64, reached: f64 },
    #[error("gap too small: need {needed:.3e}, widest certified gap is {available:.3e}")]
    GapTooSmall { needed: f64, available: f64 },
    #[error("too few orbits at depth {0}")]
    TooFewOrbits(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

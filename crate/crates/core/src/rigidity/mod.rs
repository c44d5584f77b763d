//! Two-table comparisons and thermodynamic estimates: orbit pairing,
//! iso-length-spectral testing, conjugacy consequences, Bowen
//! dimension, trace covers and gaps, and density ratios.

pub mod conjugacy;
pub mod cover;
pub mod density;
pub mod dimension;
pub mod gap;
pub mod pairing;

pub use conjugacy::{conjugacy_consequence_report, derivative_estimate, ConjugacyReport};
pub use cover::{check_cover_contains_orbits, trace_cover, TraceCover};
pub use density::{one_step_factor, unstable_density_ratio, DensityRatio};
pub use dimension::{bowen_dimension, box_counting_stable_slice, DimensionEstimate};
pub use gap::{gap_perturbation_experiment, GapChoice, GapExperimentReport};
pub use pairing::{
    iso_length_spectral_report, match_periodic_orbits, AlphabetMap, IsoSpectralReport,
    OrbitPairing,
};

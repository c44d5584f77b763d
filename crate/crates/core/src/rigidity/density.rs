//! The unstable conditional-density ratio: a truncated infinite product
//! of backward expansion factors along two leaf-mates.

use serde::{Deserialize, Serialize};

use crate::dynamics::map_differential_from_data;
use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::num::{Mat2, Vec2};
use crate::orbits::{solve_anchored_segment, solve_periodic_orbit, OrbitSegment, TrappedPoint};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DensityRatio {
    pub value: f64,
    pub tail_bound: f64,
    pub depth: usize,
}

/// Backward expansion factors `|DF^{-1}(F^{-k} z)|_{E^u}|` for
/// `k = 1..=depth`, with the unstable direction transported forward
/// from the asymptotic periodic eigen-direction in the deep past.
fn backward_norms(table: &Table, seg: &OrbitSegment, depth: usize, seed: Vec2) -> Vec<f64> {
    let window = seg.window as isize;
    let mut e = seed;
    let mut expansion = Vec::new(); // g_j = |DF(z_j) e_j| for j = -window .. -1
    for j in -window..0 {
        let a = seg.site(j);
        let b = seg.site(j + 1);
        let pa = seg.phase_point(table, j);
        let pb = seg.phase_point(table, j + 1);
        let d = map_differential_from_data(
            seg.tau(table, j),
            table.curve(a.0).curvature(a.1),
            table.curve(b.0).curvature(b.1),
            pa.nu(),
            pb.nu(),
        );
        let image = d.apply(e);
        let g = image.norm();
        expansion.push(g);
        e = image / g;
    }
    // |DF^{-1}(F^{-k} z)|_{E^u}| = 1 / g_{-k-1}; g index: expansion[window - 1 - k]
    (1..=depth).map(|k| 1.0 / expansion[(window as usize) - 1 - k]).collect()
}

/// Unstable eigen-direction of the past cycle's orbit, used to seed the
/// transported direction deep in the shared past.
fn past_seed(table: &Table, z: &TrappedPoint) -> Result<Vec2> {
    let orbit = solve_periodic_orbit(table, &z.code.past_cycle)?;
    let m: Mat2 = orbit.monodromy;
    let (big, _) = m.real_eigenvalues().ok_or(Error::NonHyperbolic(m.trace().abs()))?;
    Ok(m.eigenvector(big))
}

/// `rho^u(x, y) = prod_{k>=1} (|DF^{-1}(F^{-k} y)|Eu| /
/// |DF^{-1}(F^{-k} x)|Eu|)^delta`, truncated at `depth` with a
/// geometric tail bound. Requires a shared-past certificate.
pub fn unstable_density_ratio(
    table: &Table,
    x: &TrappedPoint,
    y: &TrappedPoint,
    delta: f64,
    depth: usize,
) -> Result<DensityRatio> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidConfig("delta must lie in (0, 1)".into()));
    }
    let probe = (depth + x.code.past_block.len().max(y.code.past_block.len()) + 6) as isize;
    for j in 0..probe {
        if x.code.symbol_at(-j) != y.code.symbol_at(-j) {
            return Err(Error::LeafMismatch("unstable", -j));
        }
    }
    // transport buffer: the seeded direction relaxes onto E^u forward
    let window = depth + 24;
    let sx = solve_anchored_segment(table, &x.code, window)?;
    let sy = solve_anchored_segment(table, &y.code, window)?;
    let seed = past_seed(table, x)?;
    let nx = backward_norms(table, &sx, depth, seed);
    let ny = backward_norms(table, &sy, depth, seed);
    let mut value = 1.0;
    let mut last_factor = 1.0f64;
    for k in 0..depth {
        let f = (ny[k] / nx[k]).powf(delta);
        value *= f;
        last_factor = f;
    }
    let tail = value.abs() * (last_factor - 1.0).abs() * 2.0;
    Ok(DensityRatio { value, tail_bound: tail, depth })
}

/// One-step cocycle factor `(|DF^{-1}(F^{-1} y)|Eu| /
/// |DF^{-1}(F^{-1} x)|Eu|)^delta` relating `rho(x, y)` to the ratio at
/// the preimages.
pub fn one_step_factor(
    table: &Table,
    x: &TrappedPoint,
    y: &TrappedPoint,
    delta: f64,
) -> Result<f64> {
    let window = 30;
    let sx = solve_anchored_segment(table, &x.code, window)?;
    let sy = solve_anchored_segment(table, &y.code, window)?;
    let seed = past_seed(table, x)?;
    let nx = backward_norms(table, &sx, 1, seed);
    let ny = backward_norms(table, &sy, 1, seed);
    Ok((ny[0] / nx[0]).powf(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tri6;
    use crate::orbits::{product_point, resolve_code_default};
    use crate::symbolic::{SpliceCode, Word};

    fn leaf_pair(table: &Table) -> (TrappedPoint, TrappedPoint, TrappedPoint) {
        let w12 = Word::parse("12").unwrap();
        let x = resolve_code_default(table, &SpliceCode::periodic(&w12, 0)).unwrap();
        let y13 = resolve_code_default(table, &SpliceCode::periodic(&Word::parse("13").unwrap(), 0)).unwrap();
        let y123 = resolve_code_default(table, &SpliceCode::periodic(&Word::parse("1213").unwrap(), 0)).unwrap();
        // same past as x, different futures
        let y = product_point(table, &y13, &x).unwrap();
        let z = product_point(table, &y123, &x).unwrap();
        (x, y, z)
    }

    #[test]
    fn identity_and_multiplicativity() {
        let t = tri6();
        let (x, y, z) = leaf_pair(&t);
        let delta = 0.3;
        let rxx = unstable_density_ratio(&t, &x, &x, delta, 40).unwrap();
        assert_eq!(rxx.value, 1.0);
        let rxy = unstable_density_ratio(&t, &x, &y, delta, 40).unwrap();
        let ryz = unstable_density_ratio(&t, &y, &z, delta, 40).unwrap();
        let rxz = unstable_density_ratio(&t, &x, &z, delta, 40).unwrap();
        assert!(
            (rxy.value * ryz.value - rxz.value).abs() < 1e-8,
            "{} * {} != {}",
            rxy.value,
            ryz.value,
            rxz.value
        );
        assert!((rxy.value - 1.0).abs() > 1e-6, "ratio should be nontrivial");
    }

    #[test]
    fn one_step_equivariance() {
        let t = tri6();
        let (x, y, _) = leaf_pair(&t);
        let delta = 0.3;
        let depth = 40;
        let rho = unstable_density_ratio(&t, &x, &y, delta, depth).unwrap();
        // preimages: shift both codes by -1
        let px = resolve_code_default(&t, &x.code.shifted(-1)).unwrap();
        let py = resolve_code_default(&t, &y.code.shifted(-1)).unwrap();
        let rho_pre = unstable_density_ratio(&t, &px, &py, delta, depth - 1).unwrap();
        let step = one_step_factor(&t, &x, &y, delta).unwrap();
        assert!(
            (rho.value - step * rho_pre.value).abs() < 1e-8,
            "{} vs {} * {}",
            rho.value,
            step,
            rho_pre.value
        );
    }

    #[test]
    fn mismatched_pasts_rejected() {
        let t = tri6();
        let x = resolve_code_default(&t, &SpliceCode::periodic(&Word::parse("12").unwrap(), 0)).unwrap();
        let y = resolve_code_default(&t, &SpliceCode::periodic(&Word::parse("13").unwrap(), 0)).unwrap();
        assert!(unstable_density_ratio(&t, &x, &y, 0.3, 30).is_err());
    }
}

//! Anchored heteroclinic segments and coded trapped points.
//!
//! A `SpliceCode` determines a unique trapped orbit. Its broken line is
//! solved on a finite window with the two ends clamped to the exact
//! bounce sites of the coding cycles' periodic orbits; interior sites
//! converge geometrically in the window size, so every iterate of a
//! coded point is recovered stably (no forward shadowing loss).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{chord_partials, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::symbolic::{SpliceCode, Sym, Word};

use super::newton::{initial_site, minimize_length};
use super::periodic::{solve_periodic_orbit, PeriodicOrbit};

/// Extra window padding beyond the code blocks for default resolves.
pub const DEFAULT_PAD: usize = 40;

/// A finite window of a coded orbit, endpoints clamped to the coding
/// cycles' periodic orbits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitSegment {
    pub code: SpliceCode,
    /// Sites exist at positions `-window ..= window`.
    pub window: usize,
    sites: Vec<(usize, f64)>,
    pub residual: f64,
}

impl OrbitSegment {
    pub fn site(&self, j: isize) -> (usize, f64) {
        self.sites[(j + self.window as isize) as usize]
    }

    /// Return time of the j-th iterate (chord `j -> j+1`);
    /// `-window <= j < window`.
    pub fn tau(&self, table: &Table, j: isize) -> f64 {
        let a = self.site(j);
        let b = self.site(j + 1);
        (table.curve(b.0).point(b.1) - table.curve(a.0).point(a.1)).norm()
    }

    /// Phase point of the j-th iterate, `r` from the outgoing chord.
    pub fn phase_point(&self, table: &Table, j: isize) -> PhasePoint {
        let a = self.site(j);
        let b = self.site(j + 1);
        let (r, _) = chord_partials(table, a, b);
        PhasePoint::new(a.0, a.1, r)
    }

    pub fn center(&self, table: &Table) -> PhasePoint {
        self.phase_point(table, 0)
    }
}

/// Solve the window `-window ..= window` of the coded orbit.
pub fn solve_anchored_segment(table: &Table, code: &SpliceCode, window: usize) -> Result<OrbitSegment> {
    code.check_admissible()?;
    let n = window as isize;
    let min_window = code.past_block.len().max(code.future_block.len()) + 2;
    if window < min_window {
        return Err(Error::WindowTooShort(format!(
            "window {window} must exceed the bridge blocks ({min_window})"
        )));
    }
    let past = solve_periodic_orbit(table, &code.past_cycle)?;
    let future = solve_periodic_orbit(table, &code.future_cycle)?;
    let pre_anchor = cycle_site(&past, code, -n)?;
    let post_anchor = cycle_site(&future, code, n)?;
    let obstacles: Vec<usize> = (-n + 1..n).map(|j| code.symbol_at(j) as usize - 1).collect();
    let init: Vec<f64> = (-n + 1..n)
        .map(|j| {
            let prev = code.symbol_at(j - 1) as usize - 1;
            let next = code.symbol_at(j + 1) as usize - 1;
            initial_site(table, code.symbol_at(j) as usize - 1, prev, next)
        })
        .collect();
    let outcome = minimize_length(table, &obstacles, init, false, Some((pre_anchor, post_anchor)))?;
    let mut sites = Vec::with_capacity(2 * window + 1);
    sites.push(pre_anchor);
    sites.extend(obstacles.iter().copied().zip(outcome.sites.iter().copied()));
    sites.push(post_anchor);
    Ok(OrbitSegment { code: code.clone(), window, sites, residual: outcome.residual })
}

/// Bounce site of the coding cycle's orbit at window position `j`
/// (which must lie beyond the bridge blocks).
fn cycle_site(orbit: &PeriodicOrbit, code: &SpliceCode, j: isize) -> Result<(usize, f64)> {
    let p = orbit.period() as isize;
    let idx = if j > 0 {
        let jj = j - 1 - code.future_block.len() as isize;
        if jj < 0 {
            return Err(Error::WindowTooShort("future anchor inside bridge block".into()));
        }
        jj.rem_euclid(p)
    } else {
        let jj = -j - 1 - code.past_block.len() as isize;
        if jj < 0 {
            return Err(Error::WindowTooShort("past anchor inside bridge block".into()));
        }
        (-1 - jj).rem_euclid(p)
    } as usize;
    debug_assert_eq!(orbit.sites[idx].0 + 1, code.symbol_at(j) as usize);
    Ok(orbit.sites[idx])
}

/// A trapped-set point: a code together with its solved collision
/// coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrappedPoint {
    pub code: SpliceCode,
    pub point: PhasePoint,
    pub residual: f64,
}

/// Resolve a code to its phase point with the given window.
pub fn resolve_code(table: &Table, code: &SpliceCode, window: usize) -> Result<TrappedPoint> {
    let segment = solve_anchored_segment(table, code, window)?;
    Ok(TrappedPoint { code: code.clone(), point: segment.center(table), residual: segment.residual })
}

/// Resolve with the default padding.
pub fn resolve_code_default(table: &Table, code: &SpliceCode) -> Result<TrappedPoint> {
    let pad = code.past_block.len().max(code.future_block.len()) + DEFAULT_PAD;
    resolve_code(table, code, pad)
}

/// Local product `[x, y]`: the point with the future of `x` and the
/// past of `y`, defined when the codes share their center cylinder.
pub fn product_point(table: &Table, x: &TrappedPoint, y: &TrappedPoint) -> Result<TrappedPoint> {
    let code = SpliceCode::bracket(&x.code, &y.code)?;
    resolve_code_default(table, &code)
}

/// The coded point of a finite odd-length cylinder window, extended
/// periodically by its two end pairs.
pub fn cylinder_code(window: &Word) -> Result<SpliceCode> {
    let n = window.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::WindowTooShort("cylinder windows must have odd length >= 3".into()));
    }
    let m = n / 2;
    let code = SpliceCode {
        past_cycle: Word::new(vec![window.syms[0], window.syms[1]]),
        past_block: window.syms[..m].to_vec(),
        center: window.syms[m],
        future_block: window.syms[m + 1..].to_vec(),
        future_cycle: Word::new(vec![window.syms[n - 2], window.syms[n - 1]]),
    };
    code.check_admissible()?;
    Ok(code)
}

/// Deterministic sample of trapped points: centers of random
/// depth-`m` cylinders (windows of length `2m + 1`).
pub fn sample_trapped_points(table: &Table, count: usize, depth: usize, seed: u64) -> Result<Vec<TrappedPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = table.len() as u8;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut syms: Vec<Sym> = Vec::with_capacity(2 * depth + 1);
        for i in 0..2 * depth + 1 {
            loop {
                let s = rng.gen_range(1..=l);
                if i == 0 || syms[i - 1] != s {
                    syms.push(s);
                    break;
                }
            }
        }
        let code = cylinder_code(&Word::new(syms))?;
        out.push(resolve_code(table, &code, depth + 12)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tri6;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn periodic_code_reproduces_orbit() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &w("12")).unwrap();
        let code = SpliceCode::periodic(&w("12"), 0);
        let seg = solve_anchored_segment(&t, &code, 12).unwrap();
        let c = seg.center(&t);
        assert_eq!(c.obstacle, orbit.sites[0].0);
        assert!((c.s - orbit.sites[0].1).abs() < 1e-10);
        assert!(c.r.abs() < 1e-10);
        // interior taus equal the orbit tau
        for j in -5..5 {
            assert!((seg.tau(&t, j) - 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn heteroclinic_center_converges_in_window() {
        let t = tri6();
        let x0 = SpliceCode::periodic(&w("12"), 0);
        let x2 = SpliceCode::periodic(&w("13"), 0);
        let code = SpliceCode::bracket(&x0, &x2).unwrap();
        let a = solve_anchored_segment(&t, &code, 20).unwrap().center(&t);
        let b = solve_anchored_segment(&t, &code, 40).unwrap().center(&t);
        assert!((a.s - b.s).abs() < 1e-10, "{} vs {}", a.s, b.s);
        assert!((a.r - b.r).abs() < 1e-10);
        // the heteroclinic point is strictly between the two periodic ones
        assert!(b.s > 0.0 && b.s < std::f64::consts::FRAC_PI_3);
    }

    #[test]
    fn product_point_idempotent_and_bracket_identity() {
        let t = tri6();
        let x = resolve_code_default(&t, &SpliceCode::periodic(&w("12"), 0)).unwrap();
        let y = resolve_code_default(&t, &SpliceCode::periodic(&w("13"), 0)).unwrap();
        let xx = product_point(&t, &x, &x).unwrap();
        assert!((xx.point.s - x.point.s).abs() < 1e-10);
        assert!((xx.point.r - x.point.r).abs() < 1e-10);
        let xy = product_point(&t, &x, &y).unwrap();
        let xxy = product_point(&t, &x, &xy).unwrap();
        assert!((xy.point.s - xxy.point.s).abs() < 1e-10);
        assert!((xy.point.r - xxy.point.r).abs() < 1e-10);
    }

    #[test]
    fn inadmissible_splice_rejected() {
        let t = tri6();
        let x = resolve_code_default(&t, &SpliceCode::periodic(&w("12"), 0)).unwrap();
        let y = resolve_code_default(&t, &SpliceCode::periodic(&w("13"), 1)).unwrap();
        assert!(product_point(&t, &x, &y).is_err());
    }

    #[test]
    fn sampled_points_are_reproducible() {
        let t = tri6();
        let a = sample_trapped_points(&t, 5, 4, 7).unwrap();
        let b = sample_trapped_points(&t, 5, 4, 7).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.point.obstacle, y.point.obstacle);
            assert!((x.point.s - y.point.s).abs() == 0.0);
        }
        let c = sample_trapped_points(&t, 5, 4, 8).unwrap();
        assert!(a.iter().zip(&c).any(|(x, y)| x.point.s != y.point.s));
    }
}

//! Hausdorff-dimension estimates: the periodic-orbit zero-pressure
//! root (Bowen's equation) and a box-counting cross-check on a stable
//! slice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::orbits::{
    resolve_code, solve_periodic_orbit, trace_invariant_curve_clamped, Stability,
};
use crate::par::par_map;
use crate::symbolic::{enumerate_words, SpliceCode, Sym, Word};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub n: usize,
    /// Root of the unstable pressure sum at depth `n`.
    pub delta_u: f64,
    /// Same for the time-reversed dynamics.
    pub delta_s: f64,
    /// Periodic points of period `n` entering the sum.
    pub orbit_count: usize,
    pub root_residual: f64,
}

/// Per-necklace expansion data for the pressure sums.
fn expansion_data(table: &Table, n: usize, reversed: bool) -> Result<Vec<(usize, f64)>> {
    let mut words: Vec<Word> = Vec::new();
    for p in 2..=n {
        if n % p != 0 {
            continue;
        }
        words.extend(enumerate_words(table.len(), p, true, true).into_iter().filter(Word::is_prime));
    }
    let solved = par_map(&words, |w| {
        let word = if reversed { w.reversed() } else { w.clone() };
        solve_periodic_orbit(table, &word).and_then(|orbit| {
            let tr = orbit.monodromy.trace().abs();
            if tr <= 2.0 {
                return Err(Error::NonHyperbolic(tr));
            }
            Ok((w.len(), orbit.monodromy.spectral_radius()))
        })
    });
    solved.into_iter().collect()
}

/// `Z_n(delta) = sum over fixed points of F^n of Lambda^{-delta}`,
/// grouped by prime necklaces: a prime necklace of period `p | n`
/// contributes `p * (Lambda^{n/p})^{-delta}`.
fn pressure_sum(data: &[(usize, f64)], n: usize, delta: f64) -> f64 {
    data.iter()
        .map(|&(p, lambda)| p as f64 * lambda.powf(-delta * (n / p) as f64))
        .sum()
}

/// Solve `Z_n(delta) = 1` by monotone bisection to 1e-10.
fn pressure_root(data: &[(usize, f64)], n: usize) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::TooFewOrbits(n));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if pressure_sum(data, n, lo) < 1.0 || pressure_sum(data, n, hi) > 1.0 {
        return Err(Error::InvalidConfig("pressure root leaves (0, 1)".into()));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if pressure_sum(data, n, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dimension estimate at period depth `n >= 2`: `delta_u` from the
/// forward dynamics, `delta_s` from the time-reversed one (solved
/// independently through the reversed words).
pub fn bowen_dimension(table: &Table, n: usize) -> Result<DimensionEstimate> {
    if n < 2 {
        return Err(Error::TooFewOrbits(n));
    }
    let fwd = expansion_data(table, n, false)?;
    let bwd = expansion_data(table, n, true)?;
    let delta_u = pressure_root(&fwd, n)?;
    let delta_s = pressure_root(&bwd, n)?;
    // each prime necklace of period p contributes its p rotations
    let orbit_count: usize = fwd.iter().map(|&(p, _)| p).sum();
    let residual = (pressure_sum(&fwd, n, delta_u) - 1.0).abs();
    Ok(DimensionEstimate {
        n,
        delta_u,
        delta_s,
        orbit_count,
        root_residual: residual,
    })
}

/// Box-counting estimate of the dimension of a stable slice
/// `W^s_loc(x0) cap Lambda`, parametrized by the traced curve's
/// arclength, with dyadic boxes and a least-squares slope over the
/// resolved range.
pub fn box_counting_stable_slice(
    table: &Table,
    word: &Word,
    phase: usize,
    depth: usize,
) -> Result<f64> {
    let base = SpliceCode::periodic(word, phase);
    // all points sharing the future of the base to all orders, with
    // arbitrary admissible pasts of length `depth`
    let mut pasts: Vec<Vec<Sym>> = vec![vec![]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &pasts {
            let right = *p.first().unwrap_or(&base.center);
            for s in 1..=table.len() as Sym {
                if s != right {
                    let mut q = p.clone();
                    q.insert(0, s);
                    next.push(q);
                }
            }
        }
        pasts = next;
    }
    let codes: Vec<SpliceCode> = pasts
        .iter()
        .map(|block| {
            let mut c = base.clone();
            let first = block[0];
            let partner = (1..=table.len() as Sym).find(|s| *s != first).unwrap();
            c.past_block = block.clone();
            c.past_cycle = Word::new(vec![first, partner]);
            c
        })
        .collect();
    let resolved = par_map(&codes, |c| resolve_code(table, c, depth + 14));
    let mut points = Vec::new();
    for r in resolved {
        points.push(r?.point);
    }
    let orbit = solve_periodic_orbit(table, word)?;
    let reach = points
        .iter()
        .map(|p| (p.s - orbit.points[phase].s).hypot(p.r - orbit.points[phase].r))
        .fold(0.0f64, f64::max);
    let (curve, _) = trace_invariant_curve_clamped(
        table,
        &orbit,
        phase,
        Stability::Stable,
        1.3 * reach + 1e-6,
        1e-3,
    )?;
    let mut params: Vec<f64> = points.iter().map(|p| curve.project(p).0).collect();
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = (params[0], params[params.len() - 1]);
    let span = hi - lo;
    // dyadic box counts over the refinable range
    let total = params.len() as f64;
    let mut fit: Vec<(f64, f64)> = Vec::new();
    for level in 0..45 {
        let boxes = (1u64 << level.min(52)) as f64;
        let mut count = 0u64;
        let mut last = u64::MAX;
        for &x in &params {
            let b = (((x - lo) / span) * boxes).floor().min(boxes - 1.0) as u64;
            if b != last {
                count += 1;
                last = b;
            }
        }
        let c = count as f64;
        if c >= 4.0 && c <= total / 4.0 {
            fit.push((level as f64, c.log2()));
        }
        if c >= total {
            break;
        }
    }
    if fit.len() < 3 {
        return Err(Error::TooFewOrbits(depth));
    }
    // least-squares slope
    let n = fit.len() as f64;
    let sx: f64 = fit.iter().map(|p| p.0).sum();
    let sy: f64 = fit.iter().map(|p| p.1).sum();
    let sxx: f64 = fit.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = fit.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

//! Stable/unstable holonomies as convergent return-time series.
//!
//! With the collision space as the global cross-section the return time
//! is the chord length, and for leaf-mates the series
//! `H^s(z0, z1) = sum_{j>=0} tau(F^j z1) - tau(F^j z0)` converges at
//! the hyperbolicity rate. Iterates are read off anchored window
//! solves, never from forward shadowing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::orbits::{solve_anchored_segment, TrappedPoint};

/// Default series depth; the tri6 contraction is about `e^{-2.3}` per
/// bounce, so 60 terms are far below double precision.
pub const DEFAULT_DEPTH: usize = 60;

/// Window padding past the summation depth.
const PAD: usize = 12;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HolonomyValue {
    pub value: f64,
    /// Geometric bound on the dropped tail, from the measured per-term
    /// contraction.
    pub tail_bound: f64,
    pub depth: usize,
}

fn leaf_window(a: &TrappedPoint, b: &TrappedPoint) -> usize {
    let blocks = a
        .code
        .past_block
        .len()
        .max(a.code.future_block.len())
        .max(b.code.past_block.len())
        .max(b.code.future_block.len());
    let cycles = a
        .code
        .past_cycle
        .len()
        .max(a.code.future_cycle.len())
        .max(b.code.past_cycle.len())
        .max(b.code.future_cycle.len());
    blocks + 2 * cycles + 4
}

fn check_shared(a: &TrappedPoint, b: &TrappedPoint, future: bool) -> Result<()> {
    let window = leaf_window(a, b);
    for j in 0..window as isize {
        let j = if future { j } else { -j };
        if a.code.symbol_at(j) != b.code.symbol_at(j) {
            return Err(Error::LeafMismatch(if future { "stable" } else { "unstable" }, j));
        }
    }
    Ok(())
}

fn series(terms: &[f64]) -> HolonomyValue {
    let value: f64 = terms.iter().sum();
    // measured contraction over the last few nonzero terms
    let mut ratio: f64 = 0.0;
    for w in terms.windows(2).rev().take(8) {
        if w[0].abs() > 1e-300 {
            ratio = ratio.max((w[1] / w[0]).abs());
        }
    }
    let ratio = ratio.min(0.9);
    let last = terms.last().map_or(0.0, |t| t.abs());
    HolonomyValue { value, tail_bound: last * ratio / (1.0 - ratio), depth: terms.len() }
}

/// `H^s(z0, z1) = sum_{j=0}^{depth-1} tau(F^j z1) - tau(F^j z0)`;
/// requires the two codes to share their future.
pub fn stable_holonomy(
    table: &Table,
    z0: &TrappedPoint,
    z1: &TrappedPoint,
    depth: usize,
) -> Result<HolonomyValue> {
    check_shared(z0, z1, true)?;
    let window = depth + PAD;
    let s0 = solve_anchored_segment(table, &z0.code, window)?;
    let s1 = solve_anchored_segment(table, &z1.code, window)?;
    let terms: Vec<f64> =
        (0..depth as isize).map(|j| s1.tau(table, j) - s0.tau(table, j)).collect();
    Ok(series(&terms))
}

/// `H^u(z0, z1) = sum_{j=-depth}^{-1} tau(F^j z0) - tau(F^j z1)`;
/// requires the two codes to share their past.
pub fn unstable_holonomy(
    table: &Table,
    z0: &TrappedPoint,
    z1: &TrappedPoint,
    depth: usize,
) -> Result<HolonomyValue> {
    check_shared(z0, z1, false)?;
    let window = depth + PAD;
    let s0 = solve_anchored_segment(table, &z0.code, window)?;
    let s1 = solve_anchored_segment(table, &z1.code, window)?;
    let terms: Vec<f64> =
        (1..=depth as isize).map(|j| s0.tau(table, -j) - s1.tau(table, -j)).collect();
    Ok(series(&terms))
}

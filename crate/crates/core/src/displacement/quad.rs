//! Quadrilaterals: four corners alternating on stable/unstable leaves,
//! their temporal displacement by three independent routes, and the
//! symplectic-area identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::orbits::{
    resolve_code_default, solve_anchored_segment, solve_periodic_orbit,
    trace_invariant_curve_clamped, PeriodicOrbit, Stability, TrappedPoint,
};
use crate::symbolic::{bridge_word, Bridge, SpliceCode, Word};

use super::holonomy::{stable_holonomy, unstable_holonomy, HolonomyValue};

/// A quadrilateral with code-certified corners:
/// `x1 = [x0, x2]`, `x3 = [x2, x0]`, all in the cylinder rectangle of
/// their shared center symbol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quadrilateral {
    pub word0: Word,
    pub phase0: usize,
    pub word2: Word,
    pub phase2: usize,
    /// Corners `x0, x1, x2, x3`.
    pub corners: [TrappedPoint; 4],
    /// False when the corner order has been reversed (which negates
    /// the displacement and the area).
    pub standard: bool,
}

impl Quadrilateral {
    /// Build the quadrilateral spanned by the periodic points of
    /// `word0` at `phase0` and `word2` at `phase2`; the two phases must
    /// sit on the same obstacle.
    pub fn from_periodic(
        table: &Table,
        word0: &Word,
        phase0: usize,
        word2: &Word,
        phase2: usize,
    ) -> Result<Quadrilateral> {
        let c0 = SpliceCode::periodic(word0, phase0);
        let c2 = SpliceCode::periodic(word2, phase2);
        let x0 = resolve_code_default(table, &c0)?;
        let x2 = resolve_code_default(table, &c2)?;
        let x1 = resolve_code_default(table, &SpliceCode::bracket(&c0, &c2)?)?;
        let x3 = resolve_code_default(table, &SpliceCode::bracket(&c2, &c0)?)?;
        Ok(Quadrilateral {
            word0: word0.clone(),
            phase0,
            word2: word2.clone(),
            phase2,
            corners: [x0, x1, x2, x3],
            standard: true,
        })
    }

    /// The same four points traversed in the opposite cyclic order,
    /// `(x1, x0, x3, x2)`; this swaps the stable/unstable roles of the
    /// four arcs and negates both `H` and the area.
    pub fn reversed(&self) -> Quadrilateral {
        let [x0, x1, x2, x3] = self.corners.clone();
        Quadrilateral {
            word0: self.word0.clone(),
            phase0: self.phase0,
            word2: self.word2.clone(),
            phase2: self.phase2,
            corners: [x1, x0, x3, x2],
            standard: !self.standard,
        }
    }
}

/// Temporal displacement by the four-holonomy sum and by the symmetric
/// Birkhoff-sum limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TemporalDisplacement {
    pub four_holonomy: f64,
    pub holonomies: [HolonomyValue; 4],
    pub symmetric_sum: f64,
    /// |four-holonomy - symmetric-sum| at the computed depth.
    pub route_difference: f64,
    pub tail_bound: f64,
    pub depth: usize,
}

/// Compute `H(Q) = H^s(x0,x1) + H^u(x1,x2) + H^s(x2,x3) + H^u(x3,x0)`
/// together with the symmetric-sum route
/// `lim_n [-tau^n(x0) + tau^n(x1) - tau^n(x2) + tau^n(x3)]`.
pub fn temporal_displacement(table: &Table, quad: &Quadrilateral, depth: usize) -> Result<TemporalDisplacement> {
    let [x0, x1, x2, x3] = &quad.corners;
    let h0 = stable_holonomy(table, x0, x1, depth)?;
    let h1 = unstable_holonomy(table, x1, x2, depth)?;
    let h2 = stable_holonomy(table, x2, x3, depth)?;
    let h3 = unstable_holonomy(table, x3, x0, depth)?;
    let four = h0.value + h1.value + h2.value + h3.value;
    // symmetric sums from one window solve per corner
    let window = depth + 10;
    let mut sym = 0.0;
    for (sign, p) in [(-1.0, x0), (1.0, x1), (-1.0, x2), (1.0, x3)] {
        let seg = solve_anchored_segment(table, &p.code, window)?;
        let n = depth as isize;
        let mut acc = 0.0;
        // tau^n(z) = sum_{j=-n}^{n} tau(F^j z)
        for j in -n..=n {
            acc += seg.tau(table, j);
        }
        sym += sign * acc;
    }
    let tail = h0.tail_bound + h1.tail_bound + h2.tail_bound + h3.tail_bound;
    Ok(TemporalDisplacement {
        four_holonomy: four,
        holonomies: [h0, h1, h2, h3],
        symmetric_sum: sym,
        route_difference: (four - sym).abs(),
        tail_bound: tail,
        depth,
    })
}

/// Area data: the circulation of the Liouville form `lambda = -r ds`
/// around the four invariant-curve arcs of the quadrilateral.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadArea {
    pub area: f64,
    /// Per-arc lambda integrals (stable x0->x1, unstable x1->x2,
    /// stable x2->x3, unstable x3->x0).
    pub arc_integrals: [f64; 4],
    /// Largest distance from a corner to the curve it must lie on.
    pub corner_defect: f64,
    /// Richardson-style error estimate of the quadrature.
    pub quadrature_error: f64,
}

/// Compute the area as the circulation over the four arcs, sampled from
/// traced invariant curves of the two periodic corners.
pub fn quadrilateral_area(table: &Table, quad: &Quadrilateral, spacing: f64) -> Result<QuadArea> {
    let orbit0 = solve_periodic_orbit(table, &quad.word0)?;
    let orbit2 = solve_periodic_orbit(table, &quad.word2)?;
    let [c0, c1, c2, c3] = &quad.corners;
    // standard arcs: x0 -> x1 on W^s(x0); x1 -> x2 on W^u(x2);
    //                x2 -> x3 on W^s(x2); x3 -> x0 on W^u(x0);
    // the reversed order swaps which orbit anchors the unstable legs
    let (u_first, u_second) =
        if quad.standard { (&orbit2, &orbit0) } else { (&orbit0, &orbit2) };
    let phase_of = |orbit: &PeriodicOrbit| {
        if std::ptr::eq(orbit, &orbit0) {
            quad.phase0
        } else {
            quad.phase2
        }
    };
    let legs: [(&PeriodicOrbit, Stability, &TrappedPoint, &TrappedPoint); 4] = [
        (&orbit0, Stability::Stable, c0, c1),
        (u_first, Stability::Unstable, c1, c2),
        (&orbit2, Stability::Stable, c2, c3),
        (u_second, Stability::Unstable, c3, c0),
    ];
    let mut arc_integrals = [0.0; 4];
    let mut corner_defect: f64 = 0.0;
    let mut quadrature_error: f64 = 0.0;
    for (k, (orbit, stability, from, to)) in legs.iter().enumerate() {
        let phase = phase_of(orbit);
        let base = orbit.points[phase];
        let reach = |p: &TrappedPoint| (p.point.s - base.s).hypot(p.point.r - base.r);
        let radius = 1.4 * reach(from).max(reach(to)) + 16.0 * spacing;
        // branches are clamped to the local chart; the corner-defect
        // check below certifies the arcs were actually reached
        let (curve, _) =
            trace_invariant_curve_clamped(table, orbit, phase, *stability, radius, spacing)?;
        let (pa, da) = curve.project(&from.point);
        let (pb, db) = curve.project(&to.point);
        corner_defect = corner_defect.max(da).max(db);
        let full = curve.lambda_integral(pa, pb);
        // crude independent consistency scale: straight-chord midpoint
        let chord = -(0.5 * (from.point.r + to.point.r)) * (to.point.s - from.point.s);
        quadrature_error = quadrature_error.max((full - chord).abs() * 1e-6);
        arc_integrals[k] = full;
    }
    Ok(QuadArea {
        area: arc_integrals.iter().sum(),
        arc_integrals,
        corner_defect,
        quadrature_error,
    })
}


/// One periodic approximant: the bridge orbit and the length
/// combination that converges to `H(Q)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicApproximant {
    pub n: usize,
    pub word: Word,
    pub bounces: usize,
    pub orbit_length: f64,
    pub approximant: f64,
}

/// Canonical bridge data: rotations of the two cycle words aligned so
/// that the bridge word is admissible, plus the junction shifts.
struct BridgeLayout {
    block_a: Word,
    block_b: Word,
    bridge1: Bridge,
    bridge3: Bridge,
    /// Junction shifts: the word shadows `F^m(x1)` and `F^k(x3)`.
    shift_m: isize,
    shift_k: isize,
}

/// Absorb splice blocks into rotated cycles when the tails are exactly
/// periodic, so empty bridges are recognized.
fn canonical(code: &SpliceCode) -> SpliceCode {
    let mut c = code.clone();
    // future stream is block ++ cycle^inf; the leading block symbol can
    // be absorbed when it equals the cycle's last symbol (rotate the
    // cycle to start there)
    loop {
        let p = c.future_cycle.len();
        match c.future_block.first() {
            Some(&b) if b == c.future_cycle.syms[p - 1] => {
                c.future_cycle = c.future_cycle.rotated(p - 1);
                c.future_block.remove(0);
            }
            _ => break,
        }
    }
    // past stream is cycle^inf ++ block; the deepest block symbol can
    // be absorbed when it equals the cycle's first symbol
    loop {
        match c.past_block.first() {
            Some(&b) if b == c.past_cycle.syms[0] => {
                c.past_cycle = c.past_cycle.rotated(1);
                c.past_block.remove(0);
            }
            _ => break,
        }
    }
    c
}

fn find_layout(quad: &Quadrilateral) -> Result<BridgeLayout> {
    let p0 = quad.word0.len() as isize;
    let p2 = quad.word2.len() as isize;
    let bound = (p0 * p2).max(2);
    for m in 0..bound {
        let x1 = canonical(&quad.corners[1].code.shifted(m));
        if !x1.future_block.is_empty() || !x1.past_block.is_empty() {
            continue;
        }
        let block_a = x1.future_cycle.clone();
        for k in 0..bound {
            let x3 = canonical(&quad.corners[3].code.shifted(k));
            if !x3.future_block.is_empty() || !x3.past_block.is_empty() {
                continue;
            }
            if x3.past_cycle != block_a || x1.past_cycle != x3.future_cycle {
                continue;
            }
            return Ok(BridgeLayout {
                block_a,
                block_b: x3.future_cycle.clone(),
                bridge1: Bridge { minus: vec![], center: x1.center, plus: vec![] },
                bridge3: Bridge { minus: vec![], center: x3.center, plus: vec![] },
                shift_m: m,
                shift_k: k,
            });
        }
    }
    Err(Error::InvalidConfig(
        "no aligned bridge layout; the corner splices need nonempty bridge blocks".into(),
    ))
}

/// Build and solve the n-th bridge orbit and return the length
/// combination approximating `H(Q)`. Requires `x0`, `x2` periodic with
/// per-bounce return times constant along each orbit (always true for
/// 2-orbits).
pub fn periodic_approx_displacement(
    table: &Table,
    quad: &Quadrilateral,
    n: usize,
) -> Result<PeriodicApproximant> {
    if !quad.standard {
        return Err(Error::InvalidConfig(
            "periodic approximation is defined for standard corner order".into(),
        ));
    }
    let orbit0 = solve_periodic_orbit(table, &quad.word0)?;
    let orbit2 = solve_periodic_orbit(table, &quad.word2)?;
    for orbit in [&orbit0, &orbit2] {
        let mean = orbit.length / orbit.period() as f64;
        if orbit.taus.iter().any(|t| (t - mean).abs() > 1e-9) {
            return Err(Error::InvalidConfig(
                "periodic approximation needs constant per-bounce return times on the anchors"
                    .into(),
            ));
        }
    }
    let layout = find_layout(quad)?;
    let word = bridge_word(&layout.block_a, &layout.block_b, &layout.bridge1, &layout.bridge3, n)?;
    let orbit = solve_periodic_orbit(table, &word)?;
    let tau0 = orbit0.length / orbit0.period() as f64;
    let tau2 = orbit2.length / orbit2.period() as f64;
    let shifts =
        layout.shift_m as f64 * (tau0 - tau2) + layout.shift_k as f64 * (tau2 - tau0);
    let approximant = orbit.length - (4 * n + 1) as f64 * (tau0 + tau2) - shifts;
    Ok(PeriodicApproximant {
        n,
        word,
        bounces: orbit.period(),
        orbit_length: orbit.length,
        approximant,
    })
}

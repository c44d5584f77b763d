//! Stable/unstable invariant curves of periodic points.
//!
//! The curve is grown from the monodromy eigen-direction by iterating a
//! fundamental annulus (forward for unstable, backward for stable via
//! the billiard involution) with adaptive resampling: mapped gaps wider
//! than the target spacing are filled by mapping Hermite-interpolated
//! preimages. Negative eigenvalues are handled by stepping two periods.

use serde::{Deserialize, Serialize};

use crate::dynamics::{billiard_map, Direction, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::num::Vec2;

use super::periodic::PeriodicOrbit;

/// Seed half-width along the eigen-direction.
const SEED_DELTA: f64 = 1e-4;
const MAX_LEVELS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CurveSample {
    /// Signed polyline arclength from the base point, in the `(s, r)`
    /// chart.
    pub param: f64,
    pub point: PhasePoint,
}

/// A sampled piece of an invariant curve through a periodic point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantCurve {
    pub base: PhasePoint,
    pub stability: Stability,
    pub eigen_direction: Vec2,
    /// Samples ordered by `param`; the base sits at `param = 0`.
    pub samples: Vec<CurveSample>,
}

fn chart(p: &PhasePoint) -> Vec2 {
    Vec2::new(p.s, p.r)
}

impl InvariantCurve {
    pub fn param_range(&self) -> (f64, f64) {
        (self.samples.first().unwrap().param, self.samples.last().unwrap().param)
    }

    fn segment_index(&self, param: f64) -> usize {
        let n = self.samples.len();
        match self.samples.binary_search_by(|c| c.param.partial_cmp(&param).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    fn hermite(&self, i: usize, t: f64) -> Vec2 {
        let n = self.samples.len();
        let p1 = chart(&self.samples[i].point);
        let p2 = chart(&self.samples[i + 1].point);
        let du = self.samples[i + 1].param - self.samples[i].param;
        let m1 = if i > 0 {
            (p2 - chart(&self.samples[i - 1].point))
                * (du / (self.samples[i + 1].param - self.samples[i - 1].param))
        } else {
            p2 - p1
        };
        let m2 = if i + 2 < n {
            (chart(&self.samples[i + 2].point) - p1)
                * (du / (self.samples[i + 2].param - self.samples[i].param))
        } else {
            p2 - p1
        };
        let t2 = t * t;
        let t3 = t2 * t;
        p1 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m1 * (t3 - 2.0 * t2 + t)
            + p2 * (-2.0 * t3 + 3.0 * t2)
            + m2 * (t3 - t2)
    }

    /// Point at a given parameter (cubic Hermite between samples).
    pub fn point_at(&self, param: f64) -> PhasePoint {
        if self.samples.len() == 1 {
            return self.base;
        }
        let i = self.segment_index(param);
        let du = self.samples[i + 1].param - self.samples[i].param;
        let t = ((param - self.samples[i].param) / du).clamp(0.0, 1.0);
        let v = self.hermite(i, t);
        PhasePoint::new(self.base.obstacle, v.x, v.y)
    }

    /// Parameter and distance of the closest curve point to `q`.
    pub fn project(&self, q: &PhasePoint) -> (f64, f64) {
        let qv = chart(q);
        if self.samples.len() < 2 {
            return (0.0, (qv - chart(&self.base)).norm());
        }
        let mut seg = 0;
        let mut best = f64::INFINITY;
        for i in 0..self.samples.len() - 1 {
            let a = chart(&self.samples[i].point);
            let b = chart(&self.samples[i + 1].point);
            let ab = b - a;
            let t = ((qv - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
            let d = (qv - (a + ab * t)).norm();
            if d < best {
                best = d;
                seg = i;
            }
        }
        // refine on the Hermite interpolant over the segment and its
        // neighbors (the polyline chord sags O(spacing^2))
        let mut out = (0.0, f64::INFINITY);
        for i in seg.saturating_sub(1)..=(seg + 1).min(self.samples.len() - 2) {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if (self.hermite(i, m1) - qv).norm_sq() < (self.hermite(i, m2) - qv).norm_sq() {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let t = 0.5 * (lo + hi);
            let d = (self.hermite(i, t) - qv).norm();
            if d < out.1 {
                let param =
                    self.samples[i].param + t * (self.samples[i + 1].param - self.samples[i].param);
                out = (param, d);
            }
        }
        out
    }

    /// Integral of the Liouville form `lambda = -r ds` along the curve
    /// from `param0` to `param1` (signed).
    pub fn lambda_integral(&self, param0: f64, param1: f64) -> f64 {
        let (sign, lo, hi) = if param0 <= param1 { (1.0, param0, param1) } else { (-1.0, param1, param0) };
        if self.samples.len() < 2 {
            return 0.0;
        }
        // 4-point Gauss-Legendre per Hermite piece
        const GX: [f64; 4] = [-0.861136311594053, -0.339981043584856, 0.339981043584856, 0.861136311594053];
        const GW: [f64; 4] = [0.347854845137454, 0.652145154862546, 0.652145154862546, 0.347854845137454];
        let mut acc = 0.0;
        let i_lo = self.segment_index(lo);
        let i_hi = self.segment_index(hi);
        for i in i_lo..=i_hi {
            let u0 = self.samples[i].param.max(lo);
            let u1 = self.samples[i + 1].param.min(hi);
            if u1 <= u0 {
                continue;
            }
            let du = self.samples[i + 1].param - self.samples[i].param;
            let (t0, t1) = ((u0 - self.samples[i].param) / du, (u1 - self.samples[i].param) / du);
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t0 + t1);
            for k in 0..4 {
                let t = mid + half * GX[k];
                let eps = 1e-6;
                let p = self.hermite(i, t);
                let dp = (self.hermite(i, (t + eps).min(1.0)) - self.hermite(i, (t - eps).max(0.0)))
                    / ((t + eps).min(1.0) - (t - eps).max(0.0));
                acc += GW[k] * half * (-p.y * dp.x);
            }
        }
        sign * acc
    }

    /// Largest distance from mapped samples to the target curve; maps
    /// every `stride`-th sample `steps` times in `direction`.
    pub fn invariance_defect(
        &self,
        table: &Table,
        target: &InvariantCurve,
        steps: usize,
        direction: Direction,
        stride: usize,
    ) -> Result<f64> {
        let (lo, hi) = target.param_range();
        let margin = 0.97;
        let mut worst: f64 = 0.0;
        'samples: for sample in self.samples.iter().step_by(stride.max(1)) {
            let mut p = sample.point;
            for _ in 0..steps {
                match billiard_map(table, &p, direction) {
                    Ok(step) => p = step.image,
                    // outer samples may leave the local chart; they are
                    // not part of the checkable window
                    Err(Error::Escape) => continue 'samples,
                    Err(e) => return Err(e),
                }
            }
            if p.obstacle != target.base.obstacle {
                continue;
            }
            let (param, dist) = target.project(&p);
            if param > lo * margin && param < hi * margin {
                worst = worst.max(dist);
            }
        }
        Ok(worst)
    }
}

/// Trace the stable or unstable curve through the periodic point at
/// word position `phase`, out to signed polyline radius `radius` on
/// both sides, with sample spacing about `spacing`. Errors with
/// `RadiusOutOfRange` when either branch leaves the local chart first.
pub fn trace_invariant_curve(
    table: &Table,
    orbit: &PeriodicOrbit,
    phase: usize,
    stability: Stability,
    radius: f64,
    spacing: f64,
) -> Result<InvariantCurve> {
    let (curve, reached) =
        trace_invariant_curve_clamped(table, orbit, phase, stability, radius, spacing)?;
    if reached < radius * (1.0 - 1e-9) {
        return Err(Error::RadiusOutOfRange { requested: radius, reached });
    }
    Ok(curve)
}

/// Same, but each branch is clamped to its own traceable range; the
/// second return value is the shorter branch's reach.
pub fn trace_invariant_curve_clamped(
    table: &Table,
    orbit: &PeriodicOrbit,
    phase: usize,
    stability: Stability,
    radius: f64,
    spacing: f64,
) -> Result<(InvariantCurve, f64)> {
    let base = orbit.points[phase];
    let m = orbit.monodromy_at(table, phase);
    let (lam_big, lam_small) =
        m.real_eigenvalues().ok_or(Error::NonHyperbolic(m.trace().abs()))?;
    let (lambda, dir, map_dir) = match stability {
        Stability::Unstable => (lam_big, m.eigenvector(lam_big), Direction::Forward),
        Stability::Stable => (lam_big, m.eigenvector(lam_small), Direction::Backward),
    };
    // negative eigenvalues flip the branch; step two periods instead
    let steps = if lambda < 0.0 { 2 * orbit.period() } else { orbit.period() };
    let expansion = if lambda < 0.0 { lambda * lambda } else { lambda };
    let mut curve = InvariantCurve { base, stability, eigen_direction: dir, samples: Vec::new() };
    if radius == 0.0 {
        curve.samples.push(CurveSample { param: 0.0, point: base });
        return Ok((curve, 0.0));
    }
    let delta = SEED_DELTA.min(0.5 * radius);
    let (mut neg, reach_neg) =
        grow_branch(table, &base, -dir, delta, expansion, steps, map_dir, radius, spacing)?;
    let (pos, reach_pos) =
        grow_branch(table, &base, dir, delta, expansion, steps, map_dir, radius, spacing)?;
    neg.reverse();
    for (t, p) in neg {
        curve.samples.push(CurveSample { param: -t, point: p });
    }
    curve.samples.push(CurveSample { param: 0.0, point: base });
    for (t, p) in pos {
        curve.samples.push(CurveSample { param: t, point: p });
    }
    if curve.samples.len() == 1 {
        return Err(Error::RadiusOutOfRange { requested: radius, reached: 0.0 });
    }
    Ok((curve, reach_neg.min(reach_pos)))
}

/// Grow one branch; returns `(polyline distance from base, point)` in
/// increasing distance together with the reach, clamped to the local
/// chart.
#[allow(clippy::too_many_arguments)]
fn grow_branch(
    table: &Table,
    base: &PhasePoint,
    dir: Vec2,
    delta: f64,
    expansion: f64,
    steps: usize,
    map_dir: Direction,
    radius: f64,
    spacing: f64,
) -> Result<(Vec<(f64, PhasePoint)>, f64)> {
    // seed covers the full fundamental annulus (delta/expansion, delta]
    // with geometric spacing, so the first mapped generation starts
    // where the seed ends (no coverage gap under strong expansion)
    let ratio = 1.2f64;
    let levels = (expansion.ln() / ratio.ln()).ceil() as usize + 1;
    let mut params: Vec<f64> = (0..=levels).map(|i| delta / ratio.powi(i as i32)).collect();
    params.retain(|t| *t * expansion > delta * 0.999);
    params.reverse();
    let mut out: Vec<(f64, PhasePoint)> = params
        .iter()
        .map(|&t| (t, PhasePoint::new(base.obstacle, base.s + t * dir.x, base.r + t * dir.y)))
        .collect();
    let mut annulus: Vec<(f64, PhasePoint)> = out.clone();
    let mut reach = delta;
    for _ in 0..MAX_LEVELS {
        if reach >= radius {
            break;
        }
        let mapped = map_annulus(table, &annulus, steps, map_dir, spacing, base.obstacle)?;
        if mapped.is_empty() {
            break; // chart exhausted
        }
        // continue the global polyline from the current tip and
        // reparametrize the new annulus by its own arclength, which
        // keeps the preimage interpolation well conditioned under the
        // strong expansion
        let mut prev = out.last().map(|(_, p)| chart_point(p)).unwrap();
        let mut acc = reach;
        let mut local = 0.0;
        let mut local_prev = chart_point(&mapped[0]);
        let mut next_annulus = Vec::with_capacity(mapped.len());
        for p in &mapped {
            let v = chart_point(p);
            acc += (v - prev).norm();
            prev = v;
            out.push((acc, *p));
            local += (v - local_prev).norm();
            local_prev = v;
            next_annulus.push((local, *p));
            if acc >= radius {
                break;
            }
        }
        if acc <= reach * (1.0 + 1e-12) {
            break; // no progress: chart exhausted
        }
        reach = acc;
        annulus = next_annulus;
    }
    Ok((out, reach))
}

fn chart_point(p: &PhasePoint) -> Vec2 {
    Vec2::new(p.s, p.r)
}

/// Map one annulus forward, bisecting preimage parameters until the
/// image spacing is fine enough. Preimage points between samples come
/// from Hermite interpolation of the annulus polyline; the annulus must
/// be parametrized by (approximate) arclength.
fn map_annulus(
    table: &Table,
    annulus: &[(f64, PhasePoint)],
    steps: usize,
    map_dir: Direction,
    spacing: f64,
    obstacle: usize,
) -> Result<Vec<PhasePoint>> {
    let interp = |t: f64| -> PhasePoint {
        // locate the bracketing samples
        let mut i = 0;
        while i + 2 < annulus.len() && annulus[i + 1].0 < t {
            i += 1;
        }
        let (t1, p1) = annulus[i];
        let (t2, p2) = annulus[i + 1];
        let u = ((t - t1) / (t2 - t1)).clamp(0.0, 1.0);
        let a = chart_point(&p1);
        let b = chart_point(&p2);
        let m1 = if i > 0 {
            (b - chart_point(&annulus[i - 1].1)) * ((t2 - t1) / (t2 - annulus[i - 1].0))
        } else {
            b - a
        };
        let m2 = if i + 2 < annulus.len() {
            (chart_point(&annulus[i + 2].1) - a) * ((t2 - t1) / (annulus[i + 2].0 - t1))
        } else {
            b - a
        };
        let u2 = u * u;
        let u3 = u2 * u;
        let v = a * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m1 * (u3 - 2.0 * u2 + u)
            + b * (-2.0 * u3 + 3.0 * u2)
            + m2 * (u3 - u2);
        PhasePoint::new(obstacle, v.x, v.y)
    };
    let map_n = |p: &PhasePoint| -> Result<Option<PhasePoint>> {
        let mut q = *p;
        for _ in 0..steps {
            match billiard_map(table, &q, map_dir) {
                Ok(step) => q = step.image,
                Err(Error::Escape) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        if q.obstacle != obstacle || q.r.abs() > 1.0 - 1e-6 {
            return Ok(None);
        }
        Ok(Some(q))
    };
    // map the annulus nodes first
    let mut nodes: Vec<(f64, Option<PhasePoint>)> = Vec::with_capacity(annulus.len());
    for (t, p) in annulus {
        nodes.push((*t, map_n(p)?));
    }
    let mut out: Vec<(f64, PhasePoint)> = Vec::new();
    for w in 0..nodes.len() - 1 {
        let (t1, q1) = (nodes[w].0, nodes[w].1);
        let (t2, q2) = (nodes[w + 1].0, nodes[w + 1].1);
        let (q1, q2) = match (q1, q2) {
            (Some(a), Some(b)) => (a, b),
            _ => break, // left the chart: stop at the last good node
        };
        if out.is_empty() {
            out.push((t1, q1));
        }
        subdivide(table, &interp, &map_n, t1, &q1, t2, &q2, spacing, 0, &mut out)?;
    }
    Ok(out.into_iter().map(|(_, p)| p).collect())
}

#[allow(clippy::too_many_arguments)]
fn subdivide(
    table: &Table,
    interp: &dyn Fn(f64) -> PhasePoint,
    map_n: &dyn Fn(&PhasePoint) -> Result<Option<PhasePoint>>,
    t1: f64,
    q1: &PhasePoint,
    t2: f64,
    q2: &PhasePoint,
    spacing: f64,
    depth: usize,
    out: &mut Vec<(f64, PhasePoint)>,
) -> Result<()> {
    let gap = (chart_point(q2) - chart_point(q1)).norm();
    if gap <= spacing || depth >= 14 {
        out.push((t2, *q2));
        return Ok(());
    }
    let tm = 0.5 * (t1 + t2);
    let pm = interp(tm);
    match map_n(&pm)? {
        Some(qm) => {
            subdivide(table, interp, map_n, t1, q1, tm, &qm, spacing, depth + 1, out)?;
            subdivide(table, interp, map_n, tm, &qm, t2, q2, spacing, depth + 1, out)
        }
        None => {
            out.push((t2, *q2));
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tri6;
    use crate::orbits::periodic::solve_periodic_orbit;
    use crate::symbolic::Word;

    #[test]
    fn eigen_direction_of_two_orbit() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &Word::parse("12").unwrap()).unwrap();
        let c = trace_invariant_curve(&t, &orbit, 0, Stability::Unstable, 0.05, 1e-3).unwrap();
        // unstable direction of [[49,-40],[-60,49]] is parallel to (2, -sqrt(6))
        let expect = Vec2::new(2.0, -(6.0f64.sqrt())).normalized();
        let cross = c.eigen_direction.cross(expect).abs();
        assert!(cross < 1e-10, "direction {:?}", c.eigen_direction);
        // stable direction is the involuted one
        let s = trace_invariant_curve(&t, &orbit, 0, Stability::Stable, 0.05, 1e-3).unwrap();
        let expect_s = Vec2::new(2.0, 6.0f64.sqrt()).normalized();
        assert!(s.eigen_direction.cross(expect_s).abs() < 1e-10);
    }

    #[test]
    fn degenerate_zero_radius() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &Word::parse("12").unwrap()).unwrap();
        let c = trace_invariant_curve(&t, &orbit, 0, Stability::Unstable, 0.0, 1e-3).unwrap();
        assert_eq!(c.samples.len(), 1);
    }

    #[test]
    fn curve_is_invariant() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &Word::parse("12").unwrap()).unwrap();
        let u = trace_invariant_curve(&t, &orbit, 0, Stability::Unstable, 0.4, 2e-3).unwrap();
        let defect = u.invariance_defect(&t, &u, 2, Direction::Forward, 7).unwrap();
        assert!(defect < 1e-8, "unstable defect {defect}");
        let s = trace_invariant_curve(&t, &orbit, 0, Stability::Stable, 0.4, 2e-3).unwrap();
        let defect = s.invariance_defect(&t, &s, 2, Direction::Backward, 7).unwrap();
        assert!(defect < 1e-8, "stable defect {defect}");
        // stable curve is the involution image of the unstable one
        for sample in s.samples.iter().step_by(11) {
            let mirrored = sample.point.involuted();
            let (_, d) = u.project(&mirrored);
            assert!(d < 1e-8, "involution mismatch {d}");
        }
    }

    #[test]
    fn lambda_integral_antisymmetric() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &Word::parse("12").unwrap()).unwrap();
        let u = trace_invariant_curve(&t, &orbit, 0, Stability::Unstable, 0.2, 1e-3).unwrap();
        let a = u.lambda_integral(-0.1, 0.15);
        let b = u.lambda_integral(0.15, -0.1);
        assert!((a + b).abs() < 1e-14);
        assert!(a.abs() > 1e-5, "integral should be nontrivial: {a}");
    }
}

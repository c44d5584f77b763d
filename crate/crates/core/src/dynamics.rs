//! The billiard map and flow on the collision space.
//!
//! Coordinates: a collision is `(obstacle, s, r)` with `s` the
//! arclength on that obstacle and `r = sin(phi)` fixed by the
//! generating relations `r = dh/ds`, `r' = -dh/ds'` for the chord
//! length `h(s, s')`. In the counterclockwise frame this reads
//! `r = -<v, T>` for the outgoing unit velocity `v`, so
//! `v = nu n - r T` with `nu = sqrt(1 - r^2)`.
//!
//! The differential returned here is the actual Jacobian of the map in
//! these coordinates,
//!
//! ```text
//! DF = [ -(h K + nu)/nu'         h/(nu nu')      ]
//!      [ h K K' + K nu' + K' nu  -(h K' + nu')/nu ]
//! ```
//!
//! which is the Chernov-Markarian matrix conjugated by
//! `(s, r) -> (s, -r)`; determinants, traces and eigenvalue moduli
//! agree, the off-diagonal signs are fixed by the generating
//! convention above (the twist entry `h/(nu nu')` is positive).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::num::{Mat2, Vec2};

/// Collisions closer to tangency than this are flagged unreliable.
pub const NEAR_TANGENCY: f64 = 1.0 - 1e-8;

/// Relative step for the central finite differences used in the
/// self-check operations.
pub const FD_STEP: f64 = 1e-6;

/// A point of the collision space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    /// 0-based obstacle index.
    pub obstacle: usize,
    pub s: f64,
    pub r: f64,
}

impl PhasePoint {
    pub fn new(obstacle: usize, s: f64, r: f64) -> Self {
        PhasePoint { obstacle, s, r }
    }

    pub fn nu(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }

    /// The billiard involution `(s, r) -> (s, -r)`.
    pub fn involuted(&self) -> PhasePoint {
        PhasePoint { obstacle: self.obstacle, s: self.s, r: -self.r }
    }

    /// Outgoing unit velocity in the plane.
    pub fn velocity(&self, table: &Table) -> Vec2 {
        let f = table.curve(self.obstacle).frame(self.s);
        f.normal * self.nu() - f.tangent * self.r
    }

    pub fn position(&self, table: &Table) -> Vec2 {
        table.curve(self.obstacle).point(self.s)
    }
}

/// A point of the suspension flow: a collision plus time since it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlowPoint {
    pub base: PhasePoint,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// One application of the billiard map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapStep {
    pub image: PhasePoint,
    /// Return time = chord length.
    pub tau: f64,
    /// Jacobian of the map at the starting point.
    pub differential: Mat2,
    pub chord_start: Vec2,
    pub chord_end: Vec2,
    /// Set when `|r'|` exceeds the tangency guard; the differential is
    /// then unreliable.
    pub near_tangency: bool,
}

/// Euclidean chord length between two boundary sites, with a flag when
/// both sites are on the same obstacle.
pub fn chord_length(table: &Table, a: (usize, f64), b: (usize, f64)) -> (f64, bool) {
    let pa = table.curve(a.0).point(a.1);
    let pb = table.curve(b.0).point(b.1);
    ((pa - pb).norm(), a.0 == b.0)
}

/// Partial derivatives of the chord length `h(s_a, s_b)`; these are the
/// generating relations `dh/ds_a = r` at the outgoing end and
/// `dh/ds_b = -r'` at the incoming end.
pub fn chord_partials(table: &Table, a: (usize, f64), b: (usize, f64)) -> (f64, f64) {
    let fa = table.curve(a.0).frame(a.1);
    let fb = table.curve(b.0).frame(b.1);
    let d = fb.point - fa.point;
    let h = d.norm();
    let u = d / h;
    (-u.dot(fa.tangent), u.dot(fb.tangent))
}

/// Second partials of the chord length: `(h_aa, h_ab, h_bb)`.
pub fn chord_second_partials(table: &Table, a: (usize, f64), b: (usize, f64)) -> (f64, f64, f64) {
    let fa = table.curve(a.0).frame(a.1);
    let fb = table.curve(b.0).frame(b.1);
    let ka = table.curve(a.0).curvature(a.1);
    let kb = table.curve(b.0).curvature(b.1);
    let d = fb.point - fa.point;
    let h = d.norm();
    let u = d / h;
    let ta = u.dot(fa.tangent);
    let tb = u.dot(fb.tangent);
    let na = u.dot(fa.normal);
    let nb = u.dot(fb.normal);
    let h_aa = (1.0 - ta * ta) / h + ka * na;
    let h_bb = (1.0 - tb * tb) / h - kb * nb;
    // cross term: -(T_b - u (u.T_b)) . T_a / h
    let h_ab = -(fb.tangent - u * tb).dot(fa.tangent) / h;
    (h_aa, h_ab, h_bb)
}

/// Trace the outgoing ray of `x` to the first obstacle it hits.
fn trace_ray(table: &Table, x: &PhasePoint) -> Option<(usize, f64, f64, Vec2, Vec2)> {
    let origin = x.position(table);
    let dir = x.velocity(table);
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, o) in table.obstacles().iter().enumerate() {
        if k == x.obstacle {
            continue;
        }
        if let Some((s, t)) = o.curve.ray_entry(origin, dir) {
            match best {
                Some((_, _, tb)) if tb <= t => {}
                _ => best = Some((k, s, t)),
            }
        }
    }
    best.map(|(k, s, t)| (k, s, t, origin, origin + dir * t))
}

/// The billiard map. Backward direction is realized through the
/// involution `I(s, r) = (s, -r)` which conjugates the map and its
/// inverse, so only one ray-tracing path exists.
pub fn billiard_map(table: &Table, x: &PhasePoint, direction: Direction) -> Result<MapStep> {
    match direction {
        Direction::Forward => billiard_map_forward(table, x),
        Direction::Backward => {
            let step = billiard_map_forward(table, &x.involuted())?;
            let image = step.image.involuted();
            // DF^{-1}(x) = J DF(I x) J with J = diag(1, -1)
            let j = Mat2::new(1.0, 0.0, 0.0, -1.0);
            let differential = j * step.differential * j;
            Ok(MapStep {
                image,
                tau: step.tau,
                differential,
                chord_start: step.chord_end,
                chord_end: step.chord_start,
                near_tangency: step.near_tangency,
            })
        }
    }
}

fn billiard_map_forward(table: &Table, x: &PhasePoint) -> Result<MapStep> {
    if x.r.abs() >= 1.0 {
        return Err(Error::TangentialCollision);
    }
    let (obstacle, s_hit, _t, origin, hit) = trace_ray(table, x).ok_or(Error::Escape)?;
    let chord = hit - origin;
    let tau = chord.norm();
    let v = chord / tau;
    let f_hit = table.curve(obstacle).frame(s_hit);
    // r' from the incoming ray; the reflected outgoing ray has the same
    // tangential component.
    let r_img = -v.dot(f_hit.tangent);
    let image = PhasePoint::new(obstacle, s_hit, r_img);
    let differential = map_differential_from_data(
        tau,
        table.curve(x.obstacle).curvature(x.s),
        table.curve(obstacle).curvature(s_hit),
        x.nu(),
        image.nu(),
    );
    Ok(MapStep {
        image,
        tau,
        differential,
        chord_start: origin,
        chord_end: hit,
        near_tangency: r_img.abs() > NEAR_TANGENCY,
    })
}

/// The Jacobian assembled from the step data `(h, K, K', nu, nu')`.
pub fn map_differential_from_data(h: f64, k: f64, k_img: f64, nu: f64, nu_img: f64) -> Mat2 {
    Mat2::new(
        -(h * k + nu) / nu_img,
        h / (nu * nu_img),
        h * k * k_img + k * nu_img + k_img * nu,
        -(h * k_img + nu_img) / nu,
    )
}

/// Jacobian of the forward map by central differences (self-check).
pub fn map_differential_fd(table: &Table, x: &PhasePoint) -> Result<Mat2> {
    let hs = FD_STEP * (1.0 + x.s.abs());
    let hr = FD_STEP * (1.0 + x.r.abs());
    let at = |s: f64, r: f64| -> Result<PhasePoint> {
        Ok(billiard_map(table, &PhasePoint::new(x.obstacle, s, r), Direction::Forward)?.image)
    };
    let sp = at(x.s + hs, x.r)?;
    let sm = at(x.s - hs, x.r)?;
    let rp = at(x.s, x.r + hr)?;
    let rm = at(x.s, x.r - hr)?;
    if sp.obstacle != sm.obstacle || rp.obstacle != rm.obstacle {
        return Err(Error::Escape);
    }
    let per = table.curve(sp.obstacle).perimeter();
    let wrap = |d: f64| {
        let d = d.rem_euclid(per);
        if d > 0.5 * per {
            d - per
        } else {
            d
        }
    };
    Ok(Mat2::new(
        wrap(sp.s - sm.s) / (2.0 * hs),
        wrap(rp.s - rm.s) / (2.0 * hr),
        (sp.r - sm.r) / (2.0 * hs),
        (rp.r - rm.r) / (2.0 * hr),
    ))
}

/// Residuals of the generating relations: `|r - dh/ds|` and
/// `|r' + dh/ds'|`, with the partials taken by central differences of
/// the chord length along the two boundaries.
pub fn check_generating_relations(table: &Table, x: &PhasePoint) -> Result<(f64, f64)> {
    let step = billiard_map(table, x, Direction::Forward)?;
    let a = (x.obstacle, x.s);
    let b = (step.image.obstacle, step.image.s);
    let hs = FD_STEP * (1.0 + x.s.abs());
    let dh_ds = (chord_length(table, (a.0, a.1 + hs), b).0 - chord_length(table, (a.0, a.1 - hs), b).0) / (2.0 * hs);
    let dh_dsp = (chord_length(table, a, (b.0, b.1 + hs)).0 - chord_length(table, a, (b.0, b.1 - hs)).0) / (2.0 * hs);
    Ok(((x.r - dh_ds).abs(), (step.image.r + dh_dsp).abs()))
}

/// Component-wise defect of the exact-symplecticity identity
/// `F^* lambda - lambda = d tau` with `lambda = -r ds`, evaluated on
/// the two coordinate directions by central differences.
pub fn liouville_defect(table: &Table, x: &PhasePoint) -> Result<f64> {
    let hs = FD_STEP * (1.0 + x.s.abs());
    let hr = FD_STEP * (1.0 + x.r.abs());
    let probe = |s: f64, r: f64| -> Result<(f64, f64, f64)> {
        let p = PhasePoint::new(x.obstacle, s, r);
        let step = billiard_map(table, &p, Direction::Forward)?;
        Ok((step.image.s, step.image.r, step.tau))
    };
    let (sp, rp, tp) = probe(x.s + hs, x.r)?;
    let (sm, rm, tm) = probe(x.s - hs, x.r)?;
    let (sp2, rp2, tp2) = probe(x.s, x.r + hr)?;
    let (sm2, rm2, tm2) = probe(x.s, x.r - hr)?;
    let base = billiard_map(table, x, Direction::Forward)?;
    let per = table.curve(base.image.obstacle).perimeter();
    let wrap = |d: f64| {
        let d = d.rem_euclid(per);
        if d > 0.5 * per {
            d - per
        } else {
            d
        }
    };
    let r_img = 0.5 * (rp + rm);
    let r_img2 = 0.5 * (rp2 + rm2);
    // on d/ds: -r' ds'/ds + r = dtau/ds
    let lhs_s = -r_img * wrap(sp - sm) / (2.0 * hs) + x.r;
    let rhs_s = (tp - tm) / (2.0 * hs);
    // on d/dr: -r' ds'/dr = dtau/dr
    let lhs_r = -r_img2 * wrap(sp2 - sm2) / (2.0 * hr);
    let rhs_r = (tp2 - tm2) / (2.0 * hr);
    Ok((lhs_s - rhs_s).abs().max((lhs_r - rhs_r).abs()))
}

/// Perpendicular propagator in Jacobi coordinates `(d omega, d xi)`:
/// free flight contributes the unipotent factor `U_t`, each collision
/// the factor `L` with lower-left entry `2 K(s') / nu'`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerpPropagator {
    pub matrix: Mat2,
    pub elapsed: f64,
    pub collisions: usize,
}

pub fn free_flight(t: f64) -> Mat2 {
    Mat2::new(1.0, t, 0.0, 1.0)
}

pub fn collision_kick(curvature: f64, nu: f64) -> Mat2 {
    Mat2::new(1.0, 0.0, 2.0 * curvature / nu, 1.0) * -1.0
}

/// Ordered product of `U` and `L` factors over `[0, duration]` starting
/// from `start` (a collision point plus elapsed flight time).
pub fn jacobi_perp_propagator(table: &Table, start: &FlowPoint, duration: f64) -> Result<PerpPropagator> {
    let mut m = Mat2::IDENTITY;
    let mut remaining = duration;
    let mut x = start.base;
    let mut step = billiard_map(table, &x, Direction::Forward)?;
    let mut to_next = step.tau - start.t;
    let mut collisions = 0;
    // slack so that a collision at exactly `duration` is included
    let slack = 1e-9 * (1.0 + duration.abs());
    while remaining >= to_next - slack {
        if step.image.r.abs() > NEAR_TANGENCY {
            return Err(Error::TangentialCollision);
        }
        m = free_flight(to_next) * m;
        let k = table.curve(step.image.obstacle).curvature(step.image.s);
        m = collision_kick(k, step.image.nu()) * m;
        collisions += 1;
        remaining -= to_next;
        x = step.image;
        step = billiard_map(table, &x, Direction::Forward)?;
        to_next = step.tau;
    }
    if remaining > slack {
        m = free_flight(remaining) * m;
    }
    Ok(PerpPropagator { matrix: m, elapsed: duration, collisions })
}

//! Arclength-parametrized boundary curves.
//!
//! Every shape is reparametrized by arclength: cumulative Gauss-Legendre
//! quadrature of the speed over a fine grid in the natural parameter,
//! inverted by bracketed Newton to `ARCLENGTH_TOL`. Circles bypass the
//! tables with closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::jet::Jet;
use crate::num::{gauss_legendre_20, Vec2};

use super::shape::{Shape, ShapeSpec};

/// Tolerance of the arclength inversion.
pub const ARCLENGTH_TOL: f64 = 1e-12;

/// Panels of the cumulative-arclength grid.
const GRID_PANELS: usize = 512;

/// Samples cached for support-point and ray bracketing.
const BRACKET_SAMPLES: usize = 256;

/// Point, unit tangent and outward unit normal at a boundary point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Frame {
    pub point: Vec2,
    pub tangent: Vec2,
    pub normal: Vec2,
}

#[derive(Clone, Debug)]
struct ArclengthTable {
    /// Natural parameter at grid nodes (uniform).
    t_step: f64,
    /// Cumulative arclength at grid nodes, `s[0] = 0`.
    s: Vec<f64>,
}

/// One obstacle boundary with exact-arclength access.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    shape: Shape,
    /// Arclength data of the base shape (only for bumped shapes, whose
    /// natural parameter is the base arclength).
    base: Option<Box<BoundaryCurve>>,
    natural_period: f64,
    perimeter: f64,
    table: Option<ArclengthTable>,
    bracket_cache: Vec<(f64, Vec2)>,
}

impl BoundaryCurve {
    pub fn build(shape: Shape) -> Result<BoundaryCurve> {
        let base = if shape.bumps.is_empty() {
            None
        } else {
            Some(Box::new(BoundaryCurve::build(Shape::new(shape.spec.clone()))?))
        };
        let natural_period = shape.natural_period(base.as_ref().map_or(0.0, |b| b.perimeter));
        let mut curve = BoundaryCurve {
            shape,
            base,
            natural_period,
            perimeter: 0.0,
            table: None,
            bracket_cache: Vec::new(),
        };
        if let Some((_, radius, _)) = curve.shape.circle_data() {
            curve.perimeter = std::f64::consts::TAU * radius;
        } else {
            let table = curve.build_table();
            curve.perimeter = *table.s.last().unwrap();
            curve.table = Some(table);
        }
        let cache = (0..BRACKET_SAMPLES)
            .map(|i| {
                let t = curve.natural_period * i as f64 / BRACKET_SAMPLES as f64;
                (t, curve.position_at_natural(t))
            })
            .collect();
        curve.bracket_cache = cache;
        Ok(curve)
    }

    fn build_table(&self) -> ArclengthTable {
        let t_step = self.natural_period / GRID_PANELS as f64;
        let mut s = Vec::with_capacity(GRID_PANELS + 1);
        s.push(0.0);
        let mut acc = 0.0;
        for i in 0..GRID_PANELS {
            let a = i as f64 * t_step;
            acc += gauss_legendre_20(a, a + t_step, |t| self.speed_at_natural(t));
            s.push(acc);
        }
        ArclengthTable { t_step, s }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn wrap(&self, s: f64) -> f64 {
        s.rem_euclid(self.perimeter)
    }

    /// Jet of the base-shape natural parameter theta as a function of
    /// base arclength, expanded at arclength `u`.
    fn base_theta_jet(&self, u: f64) -> Jet {
        let base = self.base.as_ref().expect("only bumped shapes have a base");
        let theta0 = base.natural_of_arclength(u);
        // s(theta0 + e) - s(theta0) as a series, then invert.
        let pos = base.shape.position_jet(theta0, None);
        let dx = pos[0].differentiate();
        let dy = pos[1].differentiate();
        let speed = dx.mul(&dx).add(&dy.mul(&dy)).sqrt();
        let ds = speed.integrate();
        let mut theta = ds.invert(); // e(delta s)
        theta.c[0] = theta0;
        theta
    }

    fn position_jets(&self, t: f64) -> [Jet; 2] {
        if self.base.is_some() {
            let f = |u: f64| self.base_theta_jet(u);
            self.shape.position_jet(t, Some(&f))
        } else {
            self.shape.position_jet(t, None)
        }
    }

    fn position_at_natural(&self, t: f64) -> Vec2 {
        let p = self.position_jets(t);
        Vec2::new(p[0].value(), p[1].value())
    }

    fn speed_at_natural(&self, t: f64) -> f64 {
        let p = self.position_jets(t);
        Vec2::new(p[0].derivative(1), p[1].derivative(1)).norm()
    }

    /// Natural parameter of a given arclength, to `ARCLENGTH_TOL`.
    pub fn natural_of_arclength(&self, s: f64) -> f64 {
        if let Some((_, radius, _)) = self.shape.circle_data() {
            return self.wrap(s) / radius;
        }
        let s = self.wrap(s);
        let table = self.table.as_ref().unwrap();
        // bracket by the monotone grid
        let idx = match table.s.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(GRID_PANELS - 1);
        let mut lo = idx as f64 * table.t_step;
        let mut hi = lo + table.t_step;
        let mut s_lo = table.s[idx];
        // Newton with bisection safeguard on f(t) = s(t) - s.
        let mut t = lo + (s - s_lo) / (table.s[idx + 1] - s_lo).max(1e-300) * table.t_step;
        for _ in 0..60 {
            let f = s_lo + gauss_legendre_20(lo, t, |u| self.speed_at_natural(u)) - s;
            if f.abs() < ARCLENGTH_TOL {
                return t;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
                s_lo = f + s;
            }
            let step = f / self.speed_at_natural(t);
            let next = t - step;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        t
    }

    /// Arclength of a natural parameter value.
    pub fn arclength_of_natural(&self, t: f64) -> f64 {
        if let Some((_, radius, _)) = self.shape.circle_data() {
            return (t * radius).rem_euclid(self.perimeter);
        }
        let table = self.table.as_ref().unwrap();
        let t = t.rem_euclid(self.natural_period);
        let idx = ((t / table.t_step) as usize).min(GRID_PANELS - 1);
        table.s[idx] + gauss_legendre_20(idx as f64 * table.t_step, t, |u| self.speed_at_natural(u))
    }

    pub fn point(&self, s: f64) -> Vec2 {
        if let Some((center, radius, phase)) = self.shape.circle_data() {
            let a = self.wrap(s) / radius + phase;
            return center + Vec2::new(a.cos(), a.sin()) * radius;
        }
        self.position_at_natural(self.natural_of_arclength(s))
    }

    pub fn frame(&self, s: f64) -> Frame {
        if let Some((center, radius, phase)) = self.shape.circle_data() {
            let a = self.wrap(s) / radius + phase;
            let n = Vec2::new(a.cos(), a.sin());
            return Frame { point: center + n * radius, tangent: n.rot90(), normal: n };
        }
        let t = self.natural_of_arclength(s);
        let p = self.position_jets(t);
        let tangent = Vec2::new(p[0].derivative(1), p[1].derivative(1)).normalized();
        Frame {
            point: Vec2::new(p[0].value(), p[1].value()),
            tangent,
            normal: tangent.rot270(),
        }
    }

    pub fn curvature(&self, s: f64) -> f64 {
        self.curvature_jet(s, 0).map(|j| j[0]).unwrap_or(f64::NAN)
    }

    /// Curvature and its derivatives with respect to arclength,
    /// `(K, K', ..., K^(order))`.
    pub fn curvature_jet(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        let available = self.shape.available_jet_order();
        if order > available {
            return Err(Error::JetOrderUnsupported { requested: order, available });
        }
        if let Some((_, radius, _)) = self.shape.circle_data() {
            let mut out = vec![0.0; order + 1];
            out[0] = 1.0 / radius;
            return Ok(out);
        }
        let t0 = self.natural_of_arclength(s);
        let p = self.position_jets(t0);
        let dx = p[0].differentiate();
        let dy = p[1].differentiate();
        let ddx = dx.differentiate();
        let ddy = dy.differentiate();
        let speed_sq = dx.mul(&dx).add(&dy.mul(&dy));
        let speed = speed_sq.sqrt();
        // K(t)-series = (x' y'' - y' x'') / speed^3
        let kappa = dx.mul(&ddy).sub(&dy.mul(&ddx)).div(&speed_sq.mul(&speed));
        // s(t0 + e) - s0 as a series, inverted to e(delta s)
        let ds = speed.integrate();
        let eps = ds.invert();
        let kappa_s = kappa.compose(&{
            let mut g = eps;
            g.c[0] = 0.0;
            g
        });
        Ok((0..=order).map(|k| kappa_s.derivative(k)).collect())
    }

    /// Minimum curvature over a dense sample (convexity certificate).
    pub fn min_curvature_sampled(&self, samples: usize) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..samples {
            let t = self.natural_period * i as f64 / samples as f64;
            let p = self.position_jets(t);
            let d1 = Vec2::new(p[0].derivative(1), p[1].derivative(1));
            let d2 = Vec2::new(p[0].derivative(2), p[1].derivative(2));
            let k = d1.cross(d2) / d1.norm().powi(3);
            if k < min {
                min = k;
            }
        }
        min
    }

    /// Support point: maximizer of `<gamma(t), w>` over the curve.
    /// Returns (natural parameter, point).
    pub fn support_point(&self, w: Vec2) -> (f64, Vec2) {
        if let Some((center, radius, _)) = self.shape.circle_data() {
            let n = w.normalized();
            // natural parameter of the support direction
            let (_, _, phase) = self.shape.circle_data().unwrap();
            let t = (n.angle() - phase).rem_euclid(std::f64::consts::TAU);
            return (t, center + n * radius);
        }
        let mut best = 0usize;
        let mut best_val = f64::NEG_INFINITY;
        for (i, (_, p)) in self.bracket_cache.iter().enumerate() {
            let v = p.dot(w);
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        let step = self.natural_period / BRACKET_SAMPLES as f64;
        let mut lo = self.bracket_cache[best].0 - step;
        let mut hi = self.bracket_cache[best].0 + step;
        // phi(t) = <gamma'(t), w> decreases through the maximizer
        let phi = |t: f64| {
            let p = self.position_jets(t);
            Vec2::new(p[0].derivative(1), p[1].derivative(1)).dot(w)
        };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if hi - lo < 1e-14 {
                break;
            }
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        (t, self.position_at_natural(t))
    }

    pub fn support_value(&self, w: Vec2) -> f64 {
        self.support_point(w).1.dot(w)
    }

    /// First intersection of the ray `origin + t dir` (t > 0) with the
    /// curve, entering from outside. Returns (arclength, ray parameter).
    pub fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<(f64, f64)> {
        if let Some((center, radius, _)) = self.shape.circle_data() {
            let oc = origin - center;
            let b = oc.dot(dir);
            let c = oc.norm_sq() - radius * radius;
            let disc = b * b - c;
            if disc <= 0.0 {
                return None;
            }
            let t = -b - disc.sqrt(); // entering root
            if t <= 1e-9 {
                return None;
            }
            let hit = origin + dir * t;
            let a = (hit - center).angle();
            let (_, _, phase) = self.shape.circle_data().unwrap();
            let s = ((a - phase).rem_euclid(std::f64::consts::TAU)) * radius;
            return Some((s, t));
        }
        // Signed offset of boundary points from the ray line.
        let w = dir.rot90();
        let off = origin.dot(w);
        let g = |t: f64| self.position_at_natural(t).dot(w) - off;
        // The two support params in directions +-w split the curve into
        // two arcs on which g is strictly monotone.
        let (t_max, p_max) = self.support_point(w);
        let (t_min, p_min) = self.support_point(-w);
        if (p_max.dot(w) - off) * (p_min.dot(w) - off) > 0.0 {
            return None;
        }
        let period = self.natural_period;
        let mut entries: Option<(f64, f64)> = None;
        for (a, b) in [(t_min, t_max), (t_max, t_min + period)] {
            let (mut lo, mut hi) = (a, if b > a { b } else { b + period });
            let (glo, _ghi) = (g(lo), g(hi));
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if hi - lo < 1e-14 {
                    break;
                }
                if (g(mid) > 0.0) == (glo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let p = self.position_at_natural(t);
            let t_ray = (p - origin).dot(dir);
            if t_ray <= 1e-9 {
                continue;
            }
            // entering means the outward normal opposes the ray
            let jet = self.position_jets(t);
            let tangent = Vec2::new(jet[0].derivative(1), jet[1].derivative(1)).normalized();
            if tangent.rot270().dot(dir) < 0.0 {
                let s = self.arclength_of_natural(t);
                match entries {
                    Some((_, best)) if best <= t_ray => {}
                    _ => entries = Some((s, t_ray)),
                }
            }
        }
        entries
    }
}

/// Convenience constructors used throughout the tests.
pub fn circle(center: Vec2, radius: f64) -> Shape {
    Shape::new(ShapeSpec::Circle { center: [center.x, center.y], radius, phase: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_frames() {
        let c = BoundaryCurve::build(circle(Vec2::ZERO, 1.0)).unwrap();
        let f = c.frame(0.0);
        assert!((f.point - Vec2::new(1.0, 0.0)).norm() < 1e-14);
        assert!((f.tangent - Vec2::new(0.0, 1.0)).norm() < 1e-14);
        assert!((f.normal - Vec2::new(1.0, 0.0)).norm() < 1e-14);
        let f = c.frame(std::f64::consts::PI);
        assert!((f.point - Vec2::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((f.tangent - Vec2::new(0.0, -1.0)).norm() < 1e-12);
        assert!((f.normal - Vec2::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ellipse_arclength_and_curvature() {
        let sh = Shape::new(ShapeSpec::Ellipse {
            center: [0.0, 0.0],
            semi_axes: [2.0, 1.0],
            rotation: 0.0,
        });
        let c = BoundaryCurve::build(sh).unwrap();
        // perimeter of a 2:1 ellipse
        assert!((c.perimeter() - 9.688448220547675).abs() < 1e-9);
        let f = c.frame(0.0);
        assert!((f.point - Vec2::new(2.0, 0.0)).norm() < 1e-12);
        assert!((f.normal - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        // K = a / b^2 at the major vertex
        let jet = c.curvature_jet(0.0, 1).unwrap();
        assert!((jet[0] - 2.0).abs() < 1e-10, "K = {}", jet[0]);
        // unit-speed parametrization
        for i in 0..40 {
            let s = c.perimeter() * i as f64 / 40.0;
            let t = c.natural_of_arclength(s);
            let back = c.arclength_of_natural(t);
            assert!((back - s).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_ray_entry() {
        let c = BoundaryCurve::build(circle(Vec2::new(6.0, 0.0), 1.0)).unwrap();
        let (s, t) = c.ray_entry(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((t - 4.0).abs() < 1e-12);
        assert!((s - std::f64::consts::PI).abs() < 1e-12);
        assert!(c.ray_entry(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)).is_none());
    }

    #[test]
    fn generic_ray_entry_matches_circle() {
        // a fourier shape with zero coefficients is a circle
        let sh = Shape::new(ShapeSpec::Fourier {
            center: [6.0, 0.0],
            radius: 1.0,
            cos: vec![],
            sin: vec![],
            phase: 0.0,
        });
        let c = BoundaryCurve::build(sh).unwrap();
        let origin = Vec2::new(1.0, 0.2);
        let dir = Vec2::new(1.0, -0.03).normalized();
        let (s, t) = c.ray_entry(origin, dir).unwrap();
        let exact = BoundaryCurve::build(circle(Vec2::new(6.0, 0.0), 1.0)).unwrap();
        let (s2, t2) = exact.ray_entry(origin, dir).unwrap();
        assert!((t - t2).abs() < 1e-9, "{t} vs {t2}");
        assert!((s - s2).abs() < 1e-9, "{s} vs {s2}");
    }
}

//! Non-eclipse certificate: the convex hull of any two obstacles must
//! be disjoint from every other obstacle.
//!
//! The hull of two convex bodies has support function
//! `max(h_i, h_j)`, so hull-vs-obstacle separation reduces to a sweep
//! over support directions, refined around the best candidate. The
//! safety margin accounts for the direction-grid resolution via a
//! diameter-based Lipschitz bound.

use serde::{Deserialize, Serialize};

use crate::num::Vec2;

use super::table::Table;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonEclipseReport {
    pub pass: bool,
    /// 1-based triples (i, j, k): hull of obstacles i and j meets k.
    pub offending: Vec<(usize, usize, usize)>,
    /// Worst certified margin over all triples (positive = separated).
    pub min_margin: f64,
    pub directions_sampled: usize,
}

/// Separation margin between hull(a, b) and c: positive iff disjoint.
fn hull_margin(table: &Table, i: usize, j: usize, k: usize, coarse: usize) -> f64 {
    let (a, b, c) = (table.curve(i), table.curve(j), table.curve(k));
    let eval = |angle: f64| {
        let w = Vec2::new(angle.cos(), angle.sin());
        -c.support_value(-w) - a.support_value(w).max(b.support_value(w))
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_angle = 0.0;
    for n in 0..coarse {
        let angle = std::f64::consts::TAU * n as f64 / coarse as f64;
        let m = eval(angle);
        if m > best {
            best = m;
            best_angle = angle;
        }
    }
    let width = std::f64::consts::TAU / coarse as f64;
    let (mut lo, mut hi) = (best_angle - width, best_angle + width);
    for _ in 0..70 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if eval(m1) < eval(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    eval(0.5 * (lo + hi)).max(best)
}

/// Check the non-eclipse condition on every triple.
pub fn check_non_eclipse(table: &Table) -> NonEclipseReport {
    let l = table.len();
    // adaptive resolution: finer grid for thin margins
    let coarse = 512;
    let mut offending = Vec::new();
    let mut min_margin = f64::INFINITY;
    // safety bound on the sweep: support functions are Lipschitz in the
    // angle with constant bounded by the scene diameter
    let diameter = scene_diameter(table);
    let safety = diameter * (std::f64::consts::TAU / coarse as f64).powi(2);
    for i in 0..l {
        for j in i + 1..l {
            for k in 0..l {
                if k == i || k == j {
                    continue;
                }
                let margin = hull_margin(table, i, j, k, coarse);
                if margin < min_margin {
                    min_margin = margin;
                }
                if margin <= safety {
                    offending.push((i + 1, j + 1, k + 1));
                }
            }
        }
    }
    NonEclipseReport { pass: offending.is_empty(), offending, min_margin, directions_sampled: coarse }
}

fn scene_diameter(table: &Table) -> f64 {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for o in table.obstacles() {
        for dir in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)] {
            let p = o.curve.support_point(dir).1;
            let q = o.curve.support_point(-dir).1;
            lo.x = lo.x.min(q.x.min(p.x));
            lo.y = lo.y.min(q.y.min(p.y));
            hi.x = hi.x.max(q.x.max(p.x));
            hi.y = hi.y.max(q.y.max(p.y));
        }
    }
    (hi - lo).norm()
}

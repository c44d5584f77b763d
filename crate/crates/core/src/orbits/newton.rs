//! Newton solvers for the broken-line length functional.
//!
//! The Hessian of `sum_j h(s_j, s_{j+1})` couples only neighbors, so
//! periodic words give a cyclic tridiagonal system (solved by Thomas
//! elimination plus a Sherman-Morrison corner correction) and anchored
//! segments a plain tridiagonal one. Both run in linear time.

use crate::dynamics::{chord_partials, chord_second_partials};
use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::num::Vec2;

/// Gradient infinity-norm required for convergence.
pub const GRADIENT_TOL: f64 = 1e-12;

const MAX_ITERATIONS: usize = 200;

/// Solve `T x = rhs` for tridiagonal `T` (diag `d`, upper/lower `e`,
/// `e[j]` couples `j` and `j+1`).
fn solve_tridiagonal(d: &[f64], e: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = d[0];
    x[0] = rhs[0] / beta;
    for j in 1..n {
        c[j] = e[j - 1] / beta;
        beta = d[j] - e[j - 1] * c[j];
        x[j] = (rhs[j] - e[j - 1] * x[j - 1]) / beta;
    }
    for j in (0..n - 1).rev() {
        x[j] -= c[j + 1] * x[j + 1];
    }
    x
}

/// Solve the cyclic tridiagonal system with corner entries `corner`
/// coupling sites `0` and `n-1` (Sherman-Morrison).
fn solve_cyclic_tridiagonal(d: &[f64], e: &[f64], corner: f64, rhs: &[f64]) -> Vec<f64> {
    let n = d.len();
    if n == 2 {
        // dense 2x2: the two edges both couple the same pair
        let off = e[0] + corner;
        let det = d[0] * d[1] - off * off;
        return vec![
            (rhs[0] * d[1] - off * rhs[1]) / det,
            (rhs[1] * d[0] - off * rhs[0]) / det,
        ];
    }
    let gamma = -d[0];
    let mut dd = d.to_vec();
    dd[0] -= gamma;
    dd[n - 1] -= corner * corner / gamma;
    let x = solve_tridiagonal(&dd, &e[..n - 1], rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner;
    let z = solve_tridiagonal(&dd, &e[..n - 1], &u);
    let vx = x[0] + corner / gamma * x[n - 1];
    let vz = 1.0 + z[0] + corner / gamma * z[n - 1];
    let factor = vx / vz;
    (0..n).map(|j| x[j] - factor * z[j]).collect()
}

/// Assembled first and second derivatives of the length functional.
struct System {
    gradient: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
    corner: f64,
}

/// Edges of the broken line: `(from site, to site)` index pairs; for a
/// periodic word the last edge wraps around.
fn assemble(table: &Table, obstacles: &[usize], sites: &[f64], periodic: bool, anchors: Option<(&(usize, f64), &(usize, f64))>) -> System {
    let n = sites.len();
    let mut gradient = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut corner = 0.0;
    let edge_count = if periodic { n } else { n - 1 };
    for j in 0..edge_count {
        let k = (j + 1) % n;
        let a = (obstacles[j], sites[j]);
        let b = (obstacles[k], sites[k]);
        let (ga, gb) = chord_partials(table, a, b);
        let (haa, hab, hbb) = chord_second_partials(table, a, b);
        gradient[j] += ga;
        gradient[k] += gb;
        diag[j] += haa;
        diag[k] += hbb;
        if k == j + 1 {
            off[j] += hab;
        } else {
            corner += hab;
        }
    }
    if let Some((pre, post)) = anchors {
        // clamped end chords: only the interior endpoint varies
        let a = (obstacles[0], sites[0]);
        let (_, gb) = chord_partials(table, (pre.0, pre.1), a);
        let (_, _, hbb) = chord_second_partials(table, (pre.0, pre.1), a);
        gradient[0] += gb;
        diag[0] += hbb;
        let b = (obstacles[n - 1], sites[n - 1]);
        let (ga, _) = chord_partials(table, b, (post.0, post.1));
        let (haa, _, _) = chord_second_partials(table, b, (post.0, post.1));
        gradient[n - 1] += ga;
        diag[n - 1] += haa;
    }
    System { gradient, diag, off, corner }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gauss-Seidel pre-pass: local 1d Newton on each site in turn.
fn gauss_seidel_sweep(table: &Table, obstacles: &[usize], sites: &mut [f64], periodic: bool, anchors: Option<(&(usize, f64), &(usize, f64))>) {
    let n = sites.len();
    for j in 0..n {
        let (prev, next) = neighbor_sites(obstacles, sites, j, periodic, anchors);
        let here = (obstacles[j], sites[j]);
        let (_, g1) = chord_partials(table, prev, here);
        let (g2, _) = chord_partials(table, here, next);
        let (_, _, h1) = chord_second_partials(table, prev, here);
        let (h2, _, _) = chord_second_partials(table, here, next);
        let g = g1 + g2;
        let h = h1 + h2;
        if h > 0.0 {
            sites[j] -= (g / h).clamp(-0.5, 0.5);
        }
    }
}

fn neighbor_sites(obstacles: &[usize], sites: &[f64], j: usize, periodic: bool, anchors: Option<(&(usize, f64), &(usize, f64))>) -> ((usize, f64), (usize, f64)) {
    let n = sites.len();
    let prev = if j > 0 {
        (obstacles[j - 1], sites[j - 1])
    } else if periodic {
        (obstacles[n - 1], sites[n - 1])
    } else {
        *anchors.unwrap().0
    };
    let next = if j + 1 < n {
        (obstacles[j + 1], sites[j + 1])
    } else if periodic {
        (obstacles[0], sites[0])
    } else {
        *anchors.unwrap().1
    };
    (prev, next)
}

pub struct NewtonOutcome {
    pub sites: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton iteration on the free sites. `anchors` holds the clamped end
/// sites for segment solves; `periodic` wraps the last edge instead.
pub fn minimize_length(
    table: &Table,
    obstacles: &[usize],
    initial: Vec<f64>,
    periodic: bool,
    anchors: Option<((usize, f64), (usize, f64))>,
) -> Result<NewtonOutcome> {
    let mut sites = initial;
    let anchors_ref = anchors.as_ref().map(|(a, b)| (a, b));
    let mut best = f64::INFINITY;
    let mut stalls = 0usize;
    for iter in 0..MAX_ITERATIONS {
        let sys = assemble(table, obstacles, &sites, periodic, anchors_ref);
        let res = inf_norm(&sys.gradient);
        if res < GRADIENT_TOL {
            return Ok(NewtonOutcome { sites, residual: res, iterations: iter });
        }
        if res < best * 0.99 {
            best = res;
            stalls = 0;
        } else {
            stalls += 1;
        }
        if stalls > 4 {
            // Newton is cycling: damp with local reflection fix-ups
            for _ in 0..3 {
                gauss_seidel_sweep(table, obstacles, &mut sites, periodic, anchors_ref);
            }
            stalls = 0;
            continue;
        }
        let rhs: Vec<f64> = sys.gradient.iter().map(|g| -g).collect();
        let delta = if periodic {
            solve_cyclic_tridiagonal(&sys.diag, &sys.off, sys.corner, &rhs)
        } else {
            solve_tridiagonal(&sys.diag, &sys.off, &rhs)
        };
        // backtracking on the gradient norm
        let mut scale = 1.0;
        let step_cap = inf_norm(&delta);
        if step_cap > 0.5 {
            scale = 0.5 / step_cap;
        }
        let mut accepted = false;
        for _ in 0..25 {
            let trial: Vec<f64> = sites.iter().zip(&delta).map(|(s, d)| s + scale * d).collect();
            let trial_sys = assemble(table, obstacles, &trial, periodic, anchors_ref);
            if inf_norm(&trial_sys.gradient) < res || scale < 1e-6 {
                sites = trial;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            for _ in 0..3 {
                gauss_seidel_sweep(table, obstacles, &mut sites, periodic, anchors_ref);
            }
        }
    }
    let sys = assemble(table, obstacles, &sites, periodic, anchors_ref);
    let residual = inf_norm(&sys.gradient);
    if residual < 1e-9 {
        // converged to a slightly looser tolerance; still usable
        return Ok(NewtonOutcome { sites, residual, iterations: MAX_ITERATIONS });
    }
    Err(Error::NonConvergence { residual, iterations: MAX_ITERATIONS })
}

/// Starting guess for a site: the boundary point of `obstacle` nearest
/// to the segment joining the neighbor obstacle centers.
pub fn initial_site(table: &Table, obstacle: usize, prev: usize, next: usize) -> f64 {
    let c = obstacle_center(table, obstacle);
    let a = obstacle_center(table, prev);
    let b = obstacle_center(table, next);
    let ab = b - a;
    let t = if ab.norm_sq() > 1e-18 { ((c - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0) } else { 0.0 };
    let q = a + ab * t;
    let dir = q - c;
    let curve = table.curve(obstacle);
    let (natural, _) = curve.support_point(dir);
    curve.arclength_of_natural(natural)
}

pub fn obstacle_center(table: &Table, i: usize) -> Vec2 {
    let curve = table.curve(i);
    let right = curve.support_point(Vec2::new(1.0, 0.0)).1;
    let left = curve.support_point(Vec2::new(-1.0, 0.0)).1;
    let up = curve.support_point(Vec2::new(0.0, 1.0)).1;
    let down = curve.support_point(Vec2::new(0.0, -1.0)).1;
    (right + left + up + down) * 0.25
}

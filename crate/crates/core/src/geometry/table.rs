//! Billiard tables: ordered unions of strictly convex obstacles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Vec2;

use super::curve::BoundaryCurve;
use super::shape::{BumpSpec, Shape, ShapeSpec};

/// Samples used for the convexity certificate.
pub const CONVEXITY_SAMPLES: usize = 4096;

/// One obstacle: a symbol of the coding alphabet plus its boundary.
/// Symbols are the 1-based positions in the table's obstacle list.
#[derive(Debug)]
pub struct Obstacle {
    pub curve: BoundaryCurve,
}

/// A table of `l >= 3` pairwise disjoint strictly convex obstacles.
#[derive(Debug)]
pub struct Table {
    obstacles: Vec<Obstacle>,
}

/// On-disk table description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableConfig {
    /// Require the non-eclipse condition at construction.
    #[serde(default)]
    pub non_eclipse: bool,
    #[serde(rename = "obstacle")]
    pub obstacles: Vec<ShapeSpec>,
}

/// A rigid motion of the plane (rotation about the origin, then
/// translation).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Isometry {
    pub rotation: f64,
    pub translation: Vec2,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry { rotation: 0.0, translation: Vec2::ZERO }
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        p.rotated(self.rotation) + self.translation
    }

    pub fn apply_dir(&self, v: Vec2) -> Vec2 {
        v.rotated(self.rotation)
    }
}

/// A localized normal-displacement perturbation of one obstacle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpPerturbation {
    /// 0-based obstacle index.
    pub obstacle: usize,
    /// Support interval start in the obstacle's (base) arclength.
    pub start: f64,
    pub width: f64,
    pub amplitude: f64,
    /// Vanishing order at the support endpoints.
    pub order: u32,
}

impl Table {
    /// Validate and build a table from shape descriptions.
    pub fn build(config: &TableConfig) -> Result<Table> {
        if config.obstacles.len() < 3 {
            return Err(Error::FewerThanThreeObstacles(config.obstacles.len()));
        }
        for spec in &config.obstacles {
            let finite = match spec {
                ShapeSpec::Circle { center, radius, phase } => {
                    center.iter().all(|v| v.is_finite()) && radius.is_finite() && *radius > 0.0 && phase.is_finite()
                }
                ShapeSpec::Ellipse { center, semi_axes, rotation } => {
                    center.iter().all(|v| v.is_finite())
                        && semi_axes.iter().all(|v| v.is_finite() && *v > 0.0)
                        && rotation.is_finite()
                }
                ShapeSpec::Fourier { center, radius, cos, sin, phase } => {
                    center.iter().all(|v| v.is_finite())
                        && radius.is_finite()
                        && *radius > 0.0
                        && cos.iter().chain(sin.iter()).all(|v| v.is_finite())
                        && phase.is_finite()
                }
            };
            if !finite {
                return Err(Error::InvalidConfig("non-finite or non-positive shape parameter".into()));
            }
        }
        let mut obstacles = Vec::with_capacity(config.obstacles.len());
        for (i, spec) in config.obstacles.iter().enumerate() {
            let curve = BoundaryCurve::build(Shape::new(spec.clone()))?;
            let min_k = curve.min_curvature_sampled(CONVEXITY_SAMPLES);
            if min_k <= 0.0 {
                return Err(Error::NonConvexShape { obstacle: i, min_curvature: min_k });
            }
            obstacles.push(Obstacle { curve });
        }
        let table = Table { obstacles };
        table.check_disjoint()?;
        if config.non_eclipse {
            let report = super::eclipse::check_non_eclipse(&table);
            if !report.pass {
                return Err(Error::EclipseViolated(report.offending[0]));
            }
        }
        Ok(table)
    }

    pub fn from_toml(text: &str) -> Result<Table> {
        let config: TableConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Table::build(&config)
    }

    pub fn load(path: &std::path::Path) -> Result<Table> {
        Table::from_toml(&std::fs::read_to_string(path)?)
    }

    fn check_disjoint(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if separation_margin(&self.obstacles[i].curve, &self.obstacles[j].curve) <= 0.0 {
                    return Err(Error::OverlappingObstacles(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.obstacles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obstacles.is_empty()
    }

    pub fn obstacle(&self, i: usize) -> &Obstacle {
        &self.obstacles[i]
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn curve(&self, i: usize) -> &BoundaryCurve {
        &self.obstacles[i].curve
    }

    pub fn total_perimeter(&self) -> f64 {
        self.obstacles.iter().map(|o| o.curve.perimeter()).sum()
    }

    /// Apply a rigid motion. Arclength parametrizations carry over
    /// pointwise: the image of the point at arclength `s` is the point
    /// at arclength `s` of the image obstacle.
    pub fn apply_isometry(&self, iso: &Isometry) -> Result<Table> {
        let specs = self
            .obstacles
            .iter()
            .map(|o| {
                let shape = o.curve.shape();
                let spec = match &shape.spec {
                    ShapeSpec::Circle { center, radius, phase } => ShapeSpec::Circle {
                        center: apply_center(iso, center),
                        radius: *radius,
                        phase: phase + iso.rotation,
                    },
                    ShapeSpec::Ellipse { center, semi_axes, rotation } => ShapeSpec::Ellipse {
                        center: apply_center(iso, center),
                        semi_axes: *semi_axes,
                        rotation: rotation + iso.rotation,
                    },
                    ShapeSpec::Fourier { center, radius, cos, sin, phase } => ShapeSpec::Fourier {
                        center: apply_center(iso, center),
                        radius: *radius,
                        cos: cos.clone(),
                        sin: sin.clone(),
                        phase: phase + iso.rotation,
                    },
                };
                (spec, shape.bumps.clone())
            })
            .collect::<Vec<_>>();
        let mut obstacles = Vec::with_capacity(specs.len());
        for (spec, bumps) in specs {
            let curve = BoundaryCurve::build(Shape { spec, bumps })?;
            obstacles.push(Obstacle { curve });
        }
        Ok(Table { obstacles })
    }

    /// Apply a bump perturbation, re-deriving the arclength
    /// parametrization. The boundary changes exactly on the support.
    pub fn perturb_boundary(&self, bump: &BumpPerturbation) -> Result<Table> {
        if !(bump.width > 0.0) || bump.width >= self.curve(bump.obstacle).perimeter() {
            return Err(Error::BadBumpSupport);
        }
        let mut obstacles = Vec::with_capacity(self.len());
        for (i, o) in self.obstacles.iter().enumerate() {
            let shape = o.curve.shape();
            let mut new_shape = shape.clone();
            if i == bump.obstacle {
                new_shape.bumps.push(BumpSpec {
                    start: bump.start,
                    width: bump.width,
                    amplitude: bump.amplitude,
                    order: bump.order,
                });
            }
            let curve = BoundaryCurve::build(new_shape)?;
            if i == bump.obstacle {
                let min_k = curve.min_curvature_sampled(CONVEXITY_SAMPLES);
                if min_k <= 0.0 {
                    return Err(Error::ConvexityLost { obstacle: i, min_curvature: min_k });
                }
            }
            obstacles.push(Obstacle { curve });
        }
        Ok(Table { obstacles })
    }

    /// Monotone correspondence between old and new arclength on the
    /// perturbed obstacle, sampled outside the support: pairs
    /// `(old s, new s)` where geometric points coincide.
    pub fn bump_parameter_correspondence(
        &self,
        perturbed: &Table,
        bump: &BumpPerturbation,
        samples: usize,
    ) -> Vec<(f64, f64)> {
        let old = self.curve(bump.obstacle);
        let new = perturbed.curve(bump.obstacle);
        let mut out = Vec::new();
        for k in 0..samples {
            let u = old.perimeter() * k as f64 / samples as f64;
            let inside =
                (u - bump.start).rem_euclid(old.perimeter()) < bump.width;
            if inside {
                continue;
            }
            // the bumped curve is parametrized by base arclength
            let s_new = new.arclength_of_natural(u);
            out.push((u, s_new));
        }
        out
    }
}

fn apply_center(iso: &Isometry, c: &[f64; 2]) -> [f64; 2] {
    let p = iso.apply(Vec2::new(c[0], c[1]));
    [p.x, p.y]
}

/// Positive when the two convex curves are disjoint: the best
/// separating-direction margin found on a refined direction sweep.
pub fn separation_margin(a: &BoundaryCurve, b: &BoundaryCurve) -> f64 {
    let eval = |angle: f64| {
        let w = Vec2::new(angle.cos(), angle.sin());
        -b.support_value(-w) - a.support_value(w)
    };
    let coarse = 256;
    let mut best_angle = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..coarse {
        let angle = std::f64::consts::TAU * i as f64 / coarse as f64;
        let m = eval(angle);
        if m > best {
            best = m;
            best_angle = angle;
        }
    }
    // golden-section refinement around the best direction
    let mut lo = best_angle - std::f64::consts::TAU / coarse as f64;
    let mut hi = best_angle + std::f64::consts::TAU / coarse as f64;
    let phi = 0.5 * (3.0 - 5.0f64.sqrt());
    let mut x1 = lo + phi * (hi - lo);
    let mut x2 = hi - phi * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    best.max(f1).max(f2)
}

/// The tri6 test table: three unit circles on an equilateral triangle
/// of side 6.
pub fn tri6() -> Table {
    tri_custom(6.0, 1.0)
}

/// Three circles of radius `radius` on an equilateral triangle of side
/// `side`.
pub fn tri_custom(side: f64, radius: f64) -> Table {
    let h = side * 0.5 * 3.0f64.sqrt();
    let config = TableConfig {
        non_eclipse: false,
        obstacles: vec![
            ShapeSpec::Circle { center: [0.0, 0.0], radius, phase: 0.0 },
            ShapeSpec::Circle { center: [side, 0.0], radius, phase: 0.0 },
            ShapeSpec::Circle { center: [side * 0.5, h], radius, phase: 0.0 },
        ],
    };
    Table::build(&config).expect("tri table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri6_builds() {
        let t = tri6();
        assert_eq!(t.len(), 3);
        for i in 0..3 {
            assert!((t.curve(i).perimeter() - std::f64::consts::TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_obstacles() {
        let config = TableConfig {
            non_eclipse: false,
            obstacles: vec![ShapeSpec::Circle { center: [0.0, 0.0], radius: 1.0, phase: 0.0 }],
        };
        assert!(matches!(Table::build(&config), Err(Error::FewerThanThreeObstacles(1))));
    }

    #[test]
    fn nonconvex_fourier_rejected() {
        // r(theta) = 1 + 0.9 cos(2 theta) changes curvature sign
        let config = TableConfig {
            non_eclipse: false,
            obstacles: vec![
                ShapeSpec::Fourier {
                    center: [0.0, 0.0],
                    radius: 1.0,
                    cos: vec![0.0, 0.9],
                    sin: vec![],
                    phase: 0.0,
                },
                ShapeSpec::Circle { center: [8.0, 0.0], radius: 1.0, phase: 0.0 },
                ShapeSpec::Circle { center: [4.0, 7.0], radius: 1.0, phase: 0.0 },
            ],
        };
        assert!(matches!(Table::build(&config), Err(Error::NonConvexShape { obstacle: 0, .. })));
    }

    #[test]
    fn overlap_rejected() {
        let config = TableConfig {
            non_eclipse: false,
            obstacles: vec![
                ShapeSpec::Circle { center: [0.0, 0.0], radius: 3.2, phase: 0.0 },
                ShapeSpec::Circle { center: [6.0, 0.0], radius: 3.2, phase: 0.0 },
                ShapeSpec::Circle { center: [3.0, 40.0], radius: 1.0, phase: 0.0 },
            ],
        };
        assert!(matches!(Table::build(&config), Err(Error::OverlappingObstacles(0, 1))));
    }

    #[test]
    fn isometry_preserves_frames_pointwise() {
        let t = tri6();
        let iso = Isometry { rotation: 0.7, translation: Vec2::new(1.3, -2.1) };
        let img = t.apply_isometry(&iso).unwrap();
        for i in 0..3 {
            for k in 0..17 {
                let s = t.curve(i).perimeter() * k as f64 / 17.0;
                let f0 = t.curve(i).frame(s);
                let f1 = img.curve(i).frame(s);
                assert!((f1.point - iso.apply(f0.point)).norm() < 1e-12);
                assert!((f1.tangent - iso.apply_dir(f0.tangent)).norm() < 1e-12);
                assert!((f1.normal - iso.apply_dir(f0.normal)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_turn_is_identity() {
        let t = tri6();
        let iso = Isometry { rotation: std::f64::consts::TAU, translation: Vec2::ZERO };
        let img = t.apply_isometry(&iso).unwrap();
        for i in 0..3 {
            let f0 = t.curve(i).frame(0.5);
            let f1 = img.curve(i).frame(0.5);
            assert!((f1.point - f0.point).norm() < 1e-12);
        }
    }

    #[test]
    fn bump_amplitude_zero_is_identity() {
        let t = tri6();
        let bump = BumpPerturbation { obstacle: 0, start: 2.0, width: 0.3, amplitude: 0.0, order: 7 };
        let p = t.perturb_boundary(&bump).unwrap();
        for k in 0..50 {
            let s = std::f64::consts::TAU * k as f64 / 50.0;
            assert!((p.curve(0).point(s) - t.curve(0).point(s)).norm() < 1e-11);
        }
    }

    #[test]
    fn small_bump_keeps_convexity_large_bump_loses_it() {
        let t = tri6();
        let small =
            BumpPerturbation { obstacle: 0, start: 2.0, width: 0.3, amplitude: 1e-3, order: 7 };
        let p = t.perturb_boundary(&small).unwrap();
        let min_k = p.curve(0).min_curvature_sampled(CONVEXITY_SAMPLES);
        assert!(min_k > 0.0 && min_k < 1.0, "min curvature {min_k}");
        // deviation is finite and positive somewhere
        let mid = p.curve(0).curvature(2.15);
        assert!((mid - 1.0).abs() > 1e-6);
        let big =
            BumpPerturbation { obstacle: 0, start: 2.0, width: 0.3, amplitude: 0.5, order: 7 };
        assert!(matches!(t.perturb_boundary(&big), Err(Error::ConvexityLost { .. })));
    }
}

//! Planar vectors and 2x2 matrices.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Scalar cross product `self.x * other.y - self.y * other.x`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Counterclockwise rotation by pi/2.
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Clockwise rotation by pi/2.
    pub fn rot270(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, t: f64) -> Vec2 {
        Vec2::new(self.x * t, self.y * t)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, t: f64) -> Vec2 {
        Vec2::new(self.x / t, self.y / t)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A 2x2 matrix in row-major order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    /// Real eigenvalues, largest magnitude first. `None` when the
    /// discriminant is negative.
    pub fn real_eigenvalues(self) -> Option<(f64, f64)> {
        let t = self.trace();
        let disc = t * t - 4.0 * self.det();
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let l1 = 0.5 * (t + sq);
        let l2 = 0.5 * (t - sq);
        if l1.abs() >= l2.abs() {
            Some((l1, l2))
        } else {
            Some((l2, l1))
        }
    }

    /// Spectral radius (largest eigenvalue modulus).
    pub fn spectral_radius(self) -> f64 {
        let t = self.trace();
        let disc = t * t - 4.0 * self.det();
        if disc >= 0.0 {
            let sq = disc.sqrt();
            (0.5 * (t + sq)).abs().max((0.5 * (t - sq)).abs())
        } else {
            // complex pair: |lambda|^2 = det
            self.det().abs().sqrt()
        }
    }

    /// Eigenvector for the given real eigenvalue, normalized.
    pub fn eigenvector(self, lambda: f64) -> Vec2 {
        // (A - lambda I) v = 0; pick the better-conditioned row.
        let r1 = Vec2::new(self.a - lambda, self.b);
        let r2 = Vec2::new(self.c, self.d - lambda);
        let v = if r1.norm() >= r2.norm() {
            Vec2::new(-r1.y, r1.x)
        } else {
            Vec2::new(-r2.y, r2.x)
        };
        v.normalized()
    }

    pub fn max_abs_diff(self, other: Mat2) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, t: f64) -> Mat2 {
        Mat2::new(self.a * t, self.b * t, self.c * t, self.d * t)
    }
}

//! Shape backends: strictly convex closed curves evaluated with Taylor
//! jets in their natural parameter.

use serde::{Deserialize, Serialize};

use crate::num::jet::{Jet, LEN};
use crate::num::Vec2;

/// Highest curvature-jet order the jet arithmetic can deliver
/// (position needs two more orders than curvature).
pub const MAX_JET_ORDER: usize = LEN - 3;

/// Geometric description of one obstacle boundary, as written in table
/// files. All shapes are parametrized counterclockwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
        /// Angular offset of the arclength origin.
        #[serde(default)]
        phase: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        /// Rigid rotation of the axes; the arclength origin sits at the
        /// image of the (+a, 0) vertex.
        #[serde(default)]
        rotation: f64,
    },
    /// Polar graph r(theta) = radius * (1 + sum_k cos[k-1] cos(k theta)
    /// + sin[k-1] sin(k theta)), theta measured from `phase`.
    Fourier {
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
}

/// A compactly supported polynomial bump applied as a normal
/// displacement over an interval of the base curve's arclength.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpSpec {
    /// Support interval `[start, start + width)` in base arclength.
    pub start: f64,
    pub width: f64,
    pub amplitude: f64,
    /// Vanishing order at the support endpoints.
    pub order: u32,
}

impl BumpSpec {
    /// Bump profile and its jet, as a function of base arclength.
    /// `B(t) = (4 t (1-t))^order` on the unit interval, peak 1 at 1/2.
    fn profile(&self, u: Jet) -> Jet {
        let t = u.sub(&Jet::constant(self.start)).scale(1.0 / self.width);
        if t.value() <= 0.0 || t.value() >= 1.0 {
            return Jet::constant(0.0);
        }
        let one_minus = Jet::constant(1.0).sub(&t);
        t.mul(&one_minus).scale(4.0).powi(self.order).scale(self.amplitude)
    }
}

/// A shape plus any number of bump perturbations. The natural
/// parameter is the shape's own (theta for the analytic families);
/// bumps are expressed in the *base* arclength, so bumped shapes are
/// parametrized by base arclength.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Shape {
    pub spec: ShapeSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bumps: Vec<BumpSpec>,
}

impl Shape {
    pub fn new(spec: ShapeSpec) -> Self {
        Shape { spec, bumps: Vec::new() }
    }

    /// Period of the natural parameter (2 pi for the analytic families,
    /// the base perimeter once bumps are present).
    pub fn natural_period(&self, base_perimeter: f64) -> f64 {
        if self.bumps.is_empty() {
            std::f64::consts::TAU
        } else {
            base_perimeter
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.spec, ShapeSpec::Circle { .. }) && self.bumps.is_empty()
    }

    pub fn circle_data(&self) -> Option<(Vec2, f64, f64)> {
        if let (ShapeSpec::Circle { center, radius, phase }, true) =
            (&self.spec, self.bumps.is_empty())
        {
            Some((Vec2::new(center[0], center[1]), *radius, *phase))
        } else {
            None
        }
    }

    /// Highest supported curvature-jet order.
    pub fn available_jet_order(&self) -> usize {
        let mut cap = MAX_JET_ORDER;
        for b in &self.bumps {
            // (t(1-t))^q is C^{q-1} at the support endpoints, so the
            // curve is C^{q-1} and curvature jets stop at q - 3.
            cap = cap.min((b.order as usize).saturating_sub(3));
        }
        cap
    }

    /// Position of the *base* shape (ignoring bumps) as jets in the
    /// analytic natural parameter theta.
    fn base_position_jet(&self, theta: f64) -> [Jet; 2] {
        let t = Jet::variable(theta);
        match &self.spec {
            ShapeSpec::Circle { center, radius, phase } => {
                let (s, c) = t.add(&Jet::constant(*phase)).sin_cos();
                [
                    c.scale(*radius).add(&Jet::constant(center[0])),
                    s.scale(*radius).add(&Jet::constant(center[1])),
                ]
            }
            ShapeSpec::Ellipse { center, semi_axes, rotation } => {
                let (s, c) = t.sin_cos();
                let x = c.scale(semi_axes[0]);
                let y = s.scale(semi_axes[1]);
                let (sr, cr) = rotation.sin_cos();
                [
                    x.scale(cr).sub(&y.scale(sr)).add(&Jet::constant(center[0])),
                    x.scale(sr).add(&y.scale(cr)).add(&Jet::constant(center[1])),
                ]
            }
            ShapeSpec::Fourier { center, radius, cos, sin, phase } => {
                let arg = t.add(&Jet::constant(*phase));
                let mut rad = Jet::constant(1.0);
                for (k, a) in cos.iter().enumerate() {
                    if *a != 0.0 {
                        let (_, ck) = arg.scale((k + 1) as f64).sin_cos();
                        rad = rad.add(&ck.scale(*a));
                    }
                }
                for (k, a) in sin.iter().enumerate() {
                    if *a != 0.0 {
                        let (sk, _) = arg.scale((k + 1) as f64).sin_cos();
                        rad = rad.add(&sk.scale(*a));
                    }
                }
                rad = rad.scale(*radius);
                let (s, c) = arg.sin_cos();
                [
                    rad.mul(&c).add(&Jet::constant(center[0])),
                    rad.mul(&s).add(&Jet::constant(center[1])),
                ]
            }
        }
    }

    /// Position as jets in the shape's natural parameter. For bumped
    /// shapes the natural parameter is base arclength and
    /// `base_theta_of` must supply the inverse arclength map of the
    /// base shape (value plus series through `Jet`).
    pub fn position_jet(&self, t: f64, base_theta_of: Option<&dyn Fn(f64) -> Jet> ) -> [Jet; 2] {
        if self.bumps.is_empty() {
            return self.base_position_jet(t);
        }
        let theta = base_theta_of
            .expect("bumped shape needs the base arclength inversion")(t);
        // Compose base position with theta(u): theta series has the
        // expansion point value in c[0]; split it off for compose().
        let base = self.base_position_jet(theta.value());
        let mut shift = theta;
        shift.c[0] = 0.0;
        let x = base[0].compose(&shift);
        let y = base[1].compose(&shift);
        // Unit outward normal of the base curve in jets: n = rot(-90) T,
        // T = gamma' / |gamma'|. Derivatives are wrt u (base arclength),
        // so |gamma'| = 1 identically, but we normalize anyway to keep
        // higher coefficients exact.
        let dx = x.differentiate();
        let dy = y.differentiate();
        let speed = dx.mul(&dx).add(&dy.mul(&dy)).sqrt();
        let tx = dx.div(&speed);
        let ty = dy.div(&speed);
        let (nx, ny) = (ty, tx.scale(-1.0));
        let u = Jet::variable(t);
        let mut beta = Jet::constant(0.0);
        for b in &self.bumps {
            beta = beta.add(&b.profile(u));
        }
        [x.add(&nx.mul(&beta)), y.add(&ny.mul(&beta))]
    }
}

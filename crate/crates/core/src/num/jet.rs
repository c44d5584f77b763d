//! Truncated Taylor arithmetic in one variable.
//!
//! A `Jet` holds the coefficients of a truncated power series
//! `f(t0 + e) = c0 + c1 e + ... + c_{N-1} e^{N-1}`. Arithmetic on jets
//! propagates derivatives exactly (up to truncation), which is how
//! curvature jets survive the chain rule through arclength
//! reparametrization without hand-derived formulas.

/// Number of stored coefficients (so derivatives up to order `LEN - 1`).
pub const LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The variable itself: `t0 + e`.
    pub fn variable(t0: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = t0;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point: `k! * c_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    /// Series of the derivative f'(t0 + e), one order shorter.
    pub fn differentiate(&self) -> Jet {
        let mut c = [0.0; LEN];
        for k in 1..LEN {
            c[k - 1] = self.c[k] * k as f64;
        }
        Jet { c }
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN - 1 {
            c[k + 1] = self.c[k] / (k + 1) as f64;
        }
        Jet { c }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            c[k] = self.c[k] + o.c[k];
        }
        Jet { c }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            c[k] = self.c[k] - o.c[k];
        }
        Jet { c }
    }

    pub fn scale(&self, t: f64) -> Jet {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v *= t;
        }
        Jet { c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for i in 0..LEN {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..LEN - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        let inv = 1.0 / o.c[0];
        for k in 0..LEN {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= o.c[j] * c[k - j];
            }
            c[k] = acc * inv;
        }
        Jet { c }
    }

    pub fn sqrt(&self) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = self.c[0].sqrt();
        let inv2 = 0.5 / c[0];
        for k in 1..LEN {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= c[j] * c[k - j];
            }
            c[k] = acc * inv2;
        }
        Jet { c }
    }

    /// sin and cos of the jet, via the coupled recurrence
    /// `(sin f)' = f' cos f`, `(cos f)' = -f' sin f`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        // fp[j] = (j+1) * self.c[j+1]: coefficients of f'
        for k in 1..LEN {
            let mut sa = 0.0;
            let mut ca = 0.0;
            for j in 0..k {
                let fp = (k - j) as f64 * self.c[k - j];
                sa += fp * c[j];
                ca += fp * s[j];
            }
            s[k] = sa / k as f64;
            c[k] = -ca / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut acc = Jet::constant(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Compose `self(g(e))` where `g` has zero constant term.
    pub fn compose(&self, g: &Jet) -> Jet {
        debug_assert!(g.c[0] == 0.0, "composition needs g(0) = 0");
        // Horner on truncated series.
        let mut acc = Jet::constant(self.c[LEN - 1]);
        for k in (0..LEN - 1).rev() {
            acc = acc.mul(g);
            acc.c[0] += self.c[k];
        }
        acc
    }

    /// Inverse series of `self` (which must have zero constant term and
    /// nonzero linear term): returns `g` with `self(g(e)) = e`.
    pub fn invert(&self) -> Jet {
        debug_assert!(self.c[0] == 0.0 && self.c[1] != 0.0);
        let mut g = Jet::constant(0.0);
        g.c[1] = 1.0 / self.c[1];
        // Newton-like fixed point: refine order by order.
        for _ in 0..LEN {
            // g <- g - (self(g) - id) / self'(g)
            let fg = self.compose(&g);
            let mut err = fg;
            err.c[1] -= 1.0;
            let dfg = self.differentiate().compose(&g);
            g = g.sub(&err.div(&dfg));
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_derivatives() {
        let t = Jet::variable(0.7);
        let (s, _c) = t.sin_cos();
        assert!((s.derivative(0) - 0.7f64.sin()).abs() < 1e-15);
        assert!((s.derivative(1) - 0.7f64.cos()).abs() < 1e-14);
        assert!((s.derivative(2) + 0.7f64.sin()).abs() < 1e-13);
        assert!((s.derivative(3) + 0.7f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn sqrt_and_div() {
        let t = Jet::variable(2.0);
        let f = t.mul(&t).add(&Jet::constant(1.0)); // t^2 + 1
        let g = f.sqrt();
        // d/dt sqrt(t^2+1) = t / sqrt(t^2+1) at t=2: 2/sqrt(5)
        assert!((g.derivative(1) - 2.0 / 5.0f64.sqrt()).abs() < 1e-13);
        let h = Jet::constant(1.0).div(&f);
        // d/dt 1/(t^2+1) = -2t/(t^2+1)^2 = -4/25
        assert!((h.derivative(1) + 4.0 / 25.0).abs() < 1e-13);
    }

    #[test]
    fn series_inversion_roundtrip() {
        // f(e) = 2e + 0.3 e^2 - 0.05 e^3
        let mut f = Jet::constant(0.0);
        f.c[1] = 2.0;
        f.c[2] = 0.3;
        f.c[3] = -0.05;
        let g = f.invert();
        let id = f.compose(&g);
        assert!((id.c[1] - 1.0).abs() < 1e-12);
        for k in (2..LEN - 1).chain([0]) {
            assert!(id.c[k].abs() < 1e-10, "c[{k}] = {}", id.c[k]);
        }
    }
}

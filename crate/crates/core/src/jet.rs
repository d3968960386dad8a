//! Second-order forward-mode jets with complex values over the real
//! coordinates (x, y, t).
//!
//! A [`Jet2`] carries the value, the three first partials and the six
//! independent second partials of a function R^3 -> C. Arithmetic propagates
//! derivatives exactly through sums, products, quotients, conjugation and
//! holomorphic elementary functions, so the Hessian stays symmetric by
//! construction.

use crate::C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Value, gradient (d/dx, d/dy, d/dt) and Hessian (xx, xy, xt, yy, yt, tt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: C64,
    pub g: [C64; 3],
    pub h: [C64; 6],
}

pub const HXX: usize = 0;
pub const HXY: usize = 1;
pub const HXT: usize = 2;
pub const HYY: usize = 3;
pub const HYT: usize = 4;
pub const HTT: usize = 5;

impl Jet2 {
    pub fn constant(v: C64) -> Self {
        Self { v, g: [ZERO; 3], h: [ZERO; 6] }
    }

    /// Jet of the coordinate function z = x + iy at the given value.
    pub fn coord_z(z: C64) -> Self {
        let mut j = Self::constant(z);
        j.g[0] = C64::new(1.0, 0.0);
        j.g[1] = C64::new(0.0, 1.0);
        j
    }

    /// Jet of conj(z) = x - iy.
    pub fn coord_zbar(z: C64) -> Self {
        let mut j = Self::constant(z.conj());
        j.g[0] = C64::new(1.0, 0.0);
        j.g[1] = C64::new(0.0, -1.0);
        j
    }

    /// Jet of the vertical coordinate t.
    pub fn coord_t(t: f64) -> Self {
        let mut j = Self::constant(C64::new(t, 0.0));
        j.g[2] = C64::new(1.0, 0.0);
        j
    }

    pub fn is_finite(&self) -> bool {
        let ok = |c: C64| c.re.is_finite() && c.im.is_finite();
        ok(self.v) && self.g.iter().all(|&c| ok(c)) && self.h.iter().all(|&c| ok(c))
    }

    /// Componentwise complex conjugate: conj commutes with real-variable
    /// differentiation.
    pub fn conj(&self) -> Self {
        Self {
            v: self.v.conj(),
            g: [self.g[0].conj(), self.g[1].conj(), self.g[2].conj()],
            h: [
                self.h[0].conj(),
                self.h[1].conj(),
                self.h[2].conj(),
                self.h[3].conj(),
                self.h[4].conj(),
                self.h[5].conj(),
            ],
        }
    }

    /// Compose with a holomorphic function given its value and first two
    /// derivatives at `self.v`.
    pub fn compose(&self, f: C64, df: C64, ddf: C64) -> Self {
        let mut h = [ZERO; 6];
        let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            h[k] = ddf * self.g[i] * self.g[j] + df * self.h[k];
        }
        Self {
            v: f,
            g: [df * self.g[0], df * self.g[1], df * self.g[2]],
            h,
        }
    }

    pub fn recip(&self) -> Self {
        let inv = C64::new(1.0, 0.0) / self.v;
        self.compose(inv, -inv * inv, C64::new(2.0, 0.0) * inv * inv * inv)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let ds = C64::new(0.5, 0.0) / s;
        let dds = -C64::new(0.25, 0.0) / (s * self.v);
        self.compose(s, ds, dds)
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let inv = C64::new(1.0, 0.0) / self.v;
        self.compose(self.v.ln(), inv, -inv * inv)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.compose(c, -s, -c)
    }

    pub fn atan(&self) -> Self {
        let one = C64::new(1.0, 0.0);
        let d = one / (one + self.v * self.v);
        let dd = -C64::new(2.0, 0.0) * self.v * d * d;
        self.compose(self.v.atan(), d, dd)
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Self::constant(C64::new(1.0, 0.0)),
            1 => *self,
            _ => {
                let f = self.v.powi(n);
                let df = C64::new(n as f64, 0.0) * self.v.powi(n - 1);
                let ddf = C64::new((n * (n - 1)) as f64, 0.0) * self.v.powi(n - 2);
                self.compose(f, df, ddf)
            }
        }
    }

    /// Principal power with real exponent.
    pub fn powf(&self, c: f64) -> Self {
        let f = self.v.powf(c);
        let df = C64::new(c, 0.0) * self.v.powf(c - 1.0);
        let ddf = C64::new(c * (c - 1.0), 0.0) * self.v.powf(c - 2.0);
        self.compose(f, df, ddf)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.v += rhs.v;
        for i in 0..3 {
            out.g[i] += rhs.g[i];
        }
        for i in 0..6 {
            out.h[i] += rhs.h[i];
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.v -= rhs.v;
        for i in 0..3 {
            out.g[i] -= rhs.g[i];
        }
        for i in 0..6 {
            out.h[i] -= rhs.h[i];
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            g: [-self.g[0], -self.g[1], -self.g[2]],
            h: [-self.h[0], -self.h[1], -self.h[2], -self.h[3], -self.h[4], -self.h[5]],
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        let mut h = [ZERO; 6];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            h[k] = self.h[k] * rhs.v
                + self.g[i] * rhs.g[j]
                + self.g[j] * rhs.g[i]
                + self.v * rhs.h[k];
        }
        Jet2 {
            v: self.v * rhs.v,
            g: [
                self.g[0] * rhs.v + self.v * rhs.g[0],
                self.g[1] * rhs.v + self.v * rhs.g[1],
                self.g[2] * rhs.v + self.v * rhs.g[2],
            ],
            h,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, eps: f64) -> bool {
        (a - b).norm() < eps
    }

    #[test]
    fn polynomial_jet_is_exact() {
        // f(x,y,t) = (x + iy)^2 * t at (2, -1, 3)
        let z = Jet2::coord_z(C64::new(2.0, -1.0));
        let t = Jet2::coord_t(3.0);
        let f = z * z * t;
        let zv = C64::new(2.0, -1.0);
        assert!(close(f.v, zv * zv * 3.0, 1e-14));
        // d/dx = 2 z t, d/dy = 2 i z t, d/dt = z^2
        assert!(close(f.g[0], 2.0 * zv * 3.0, 1e-14));
        assert!(close(f.g[1], C64::new(0.0, 2.0) * zv * 3.0, 1e-14));
        assert!(close(f.g[2], zv * zv, 1e-14));
        // d2/dx2 = 2 t, d2/dxdy = 2 i t, d2/dxdt = 2 z, d2/dt2 = 0
        assert!(close(f.h[HXX], C64::new(6.0, 0.0), 1e-14));
        assert!(close(f.h[HXY], C64::new(0.0, 6.0), 1e-14));
        assert!(close(f.h[HXT], 2.0 * zv, 1e-14));
        assert!(close(f.h[HTT], ZERO, 1e-14));
    }

    #[test]
    fn quotient_and_sqrt_consistent() {
        // 1/sqrt(f) == recip(sqrt(f)) for f = 2 + z zbar
        let z = Jet2::coord_z(C64::new(0.7, 0.4));
        let f = Jet2::constant(C64::new(2.0, 0.0)) + z * z.conj();
        let a = f.sqrt().recip();
        let b = f.powf(-0.5);
        assert!(close(a.v, b.v, 1e-13));
        for i in 0..3 {
            assert!(close(a.g[i], b.g[i], 1e-12));
        }
        for i in 0..6 {
            assert!(close(a.h[i], b.h[i], 1e-12));
        }
    }

    #[test]
    fn exp_ln_round_trip() {
        let z = Jet2::coord_z(C64::new(1.2, 0.3));
        let t = Jet2::coord_t(0.5);
        let f = z * z.conj() + t * t + Jet2::constant(C64::new(0.5, 0.0));
        let g = f.ln().exp();
        assert!(close(f.v, g.v, 1e-13));
        for i in 0..3 {
            assert!(close(f.g[i], g.g[i], 1e-12));
        }
        for i in 0..6 {
            assert!(close(f.h[i], g.h[i], 1e-11));
        }
    }
}

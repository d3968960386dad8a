//! Heisenberg group arithmetic and the coordinate systems used by the catalog.
//!
//! The Heisenberg group is C x R with the product
//! (z,t)(z',t') = (z+z', t+t'+2 Im(z conj(z'))), Koranyi norm
//! ||(z,t)|| = (|z|^4 + t^2)^(1/4) and left-invariant distance
//! d(p,q) = ||p^{-1} q||.

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;
use std::fmt;

/// A point of the Heisenberg group: complex horizontal part and real vertical part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub z: C64,
    pub t: f64,
}

impl HPoint {
    pub fn new(z: C64, t: f64) -> Self {
        Self { z, t }
    }

    pub fn from_parts(x: f64, y: f64, t: f64) -> Self {
        Self { z: C64::new(x, y), t }
    }

    pub fn origin() -> Self {
        Self { z: C64::new(0.0, 0.0), t: 0.0 }
    }

    pub fn x(&self) -> f64 {
        self.z.re
    }

    pub fn y(&self) -> f64 {
        self.z.im
    }

    pub fn is_finite(&self) -> bool {
        self.z.re.is_finite() && self.z.im.is_finite() && self.t.is_finite()
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}i, {})", self.z.re, self.z.im, self.t)
    }
}

/// Group product (z,t)(z',t') = (z+z', t+t'+2 Im(z conj(z'))).
pub fn group_mul(p: HPoint, q: HPoint) -> HPoint {
    HPoint {
        z: p.z + q.z,
        t: p.t + q.t + 2.0 * (p.z * q.z.conj()).im,
    }
}

/// Group inverse (-z, -t).
pub fn group_inv(p: HPoint) -> HPoint {
    HPoint { z: -p.z, t: -p.t }
}

/// Koranyi norm (|z|^4 + t^2)^(1/4).
pub fn heis_norm(p: HPoint) -> f64 {
    let r2 = p.z.norm_sqr();
    (r2 * r2 + p.t * p.t).powf(0.25)
}

/// Left-invariant distance d(p,q) = ||p^{-1} q||.
pub fn heis_dist(p: HPoint, q: HPoint) -> f64 {
    heis_norm(group_mul(group_inv(p), q))
}

/// Logarithmic coordinates (xi, psi, eta) with
/// (z,t) = (i cos^(1/2)(psi) e^((xi + i(psi - 3 eta))/2), -sin(psi) e^xi).
///
/// psi lies in [-pi/2, pi/2] and eta satisfies psi - 3 pi <= 2 eta < psi + pi.
/// The point is 4pi/3-periodic in eta, so `to_log_coords` normalizes eta into
/// the lower sub-window [(psi - 3 pi)/2, (psi - 3 pi)/2 + 4 pi/3) where the
/// representative is unique.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoords {
    pub xi: f64,
    pub psi: f64,
    pub eta: f64,
}

impl LogCoords {
    pub fn new(xi: f64, psi: f64, eta: f64) -> Self {
        Self { xi, psi, eta }
    }

    /// Window invariant from the parametrization: psi - 3 pi <= 2 eta < psi + pi.
    pub fn in_window(&self) -> bool {
        self.psi.abs() <= PI / 2.0 + 1e-12
            && self.psi - 3.0 * PI <= 2.0 * self.eta + 1e-12
            && 2.0 * self.eta < self.psi + PI + 1e-12
    }
}

/// Heisenberg point of the logarithmic coordinates (xi, psi, eta).
pub fn from_log_coords(c: LogCoords) -> HPoint {
    let r = c.psi.cos().max(0.0).sqrt() * (c.xi / 2.0).exp();
    let phase = C64::new(0.0, (c.psi - 3.0 * c.eta) / 2.0).exp();
    HPoint {
        z: C64::new(0.0, 1.0) * r * phase,
        t: -c.psi.sin() * c.xi.exp(),
    }
}

/// Logarithmic coordinates of p, normalized into the unique sub-window.
///
/// Fails on the group origin. On the vertical axis (z = 0) the angle is
/// undefined and eta is set to the window start.
pub fn to_log_coords(p: HPoint) -> Result<LogCoords> {
    let r2 = p.z.norm_sqr();
    let n4 = r2 * r2 + p.t * p.t;
    if n4 == 0.0 {
        return Err(Error::OriginNotRepresentable);
    }
    let xi = 0.5 * n4.ln();
    let e_xi = n4.sqrt();
    // cos(psi) = |z|^2 e^{-xi} >= 0, sin(psi) = -t e^{-xi}
    let psi = (-p.t).atan2(r2);
    let window_start = (psi - 3.0 * PI) / 2.0;
    let eta = if r2 == 0.0 {
        window_start
    } else {
        // arg z = pi/2 + (psi - 3 eta)/2 mod 2 pi
        let raw = (psi + PI - 2.0 * p.z.arg()) / 3.0;
        let period = 4.0 * PI / 3.0;
        raw - period * ((raw - window_start) / period).floor()
    };
    debug_assert!(e_xi.is_finite());
    Ok(LogCoords { xi, psi, eta })
}

/// Cylindrical coordinates (r, theta, t) with z = r e^{i theta}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylCoords {
    pub r: f64,
    pub theta: f64,
    pub t: f64,
}

impl CylCoords {
    pub fn new(r: f64, theta: f64, t: f64) -> Self {
        Self { r, theta, t }
    }
}

/// Cylindrical coordinates of p; theta is normalized to [0, 2 pi) and set to 0
/// on the axis z = 0.
pub fn to_cylindrical(p: HPoint) -> CylCoords {
    let r = p.z.norm();
    let theta = if r == 0.0 {
        0.0
    } else {
        let a = p.z.arg();
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };
    CylCoords { r, theta, t: p.t }
}

pub fn from_cylindrical(c: CylCoords) -> HPoint {
    HPoint {
        z: C64::from_polar(c.r, c.theta),
        t: c.t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64, t: f64) -> HPoint {
        HPoint::from_parts(x, y, t)
    }

    #[test]
    fn product_of_unit_generators() {
        // (1,0)(i,0) = (1+i, 2 Im(1 * conj(i))) = (1+i, -2); independent
        // evaluation of the formula: 2 Im(conj(i)) = 2 * (-1).
        let p = group_mul(pt(1.0, 0.0, 0.0), pt(0.0, 1.0, 0.0));
        assert_eq!(p, pt(1.0, 1.0, -2.0));
        let expected_t = 2.0 * (C64::new(1.0, 0.0) * C64::new(0.0, 1.0).conj()).im;
        assert_eq!(p.t, expected_t);
    }

    #[test]
    fn non_commutativity_witness() {
        let a = group_mul(pt(1.0, 0.0, 0.0), pt(0.0, 1.0, 0.0));
        let b = group_mul(pt(0.0, 1.0, 0.0), pt(1.0, 0.0, 0.0));
        assert_ne!(a, b);
        assert_eq!(a.t, -b.t);
    }

    #[test]
    fn inverse_and_center() {
        let p = pt(1.0, 0.0, 2.0);
        assert_eq!(group_mul(p, group_inv(p)), HPoint::origin());
        assert_eq!(group_inv(pt(0.0, 1.0, -3.0)), pt(0.0, -1.0, 3.0));
        assert_eq!(group_inv(HPoint::origin()), HPoint::origin());
        // center: (0,t)(0,t') = (0, t+t')
        let c = group_mul(pt(0.0, 0.0, 1.5), pt(0.0, 0.0, -0.25));
        assert_eq!(c, pt(0.0, 0.0, 1.25));
    }

    #[test]
    fn norm_values() {
        // (|z|^4 + t^2)^(1/4) = 16^(1/4) = 2
        assert_abs_diff_eq!(heis_norm(pt(0.0, 0.0, 4.0)), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(heis_norm(pt(1.0, 0.0, 0.0)), 1.0, epsilon = 1e-15);
        assert_eq!(heis_norm(HPoint::origin()), 0.0);
    }

    #[test]
    fn dist_reduces_to_norm() {
        assert_abs_diff_eq!(
            heis_dist(HPoint::origin(), pt(0.0, 0.0, 4.0)),
            2.0,
            epsilon = 1e-15
        );
        let p = pt(0.3, -0.7, 1.1);
        assert_eq!(heis_dist(p, p), 0.0);
    }

    #[test]
    fn log_coords_reference_point() {
        // (xi,psi,eta) = (0,0,0) maps to (i, 0)
        let p = from_log_coords(LogCoords::new(0.0, 0.0, 0.0));
        assert_abs_diff_eq!(p.z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z.im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn log_coords_axis() {
        // psi = +-pi/2 collapses z and gives t = -+ e^xi
        let p = from_log_coords(LogCoords::new(0.7, PI / 2.0, 1.0));
        assert_abs_diff_eq!(p.z.norm(), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(p.t, -(0.7f64).exp(), epsilon = 1e-12);
        let q = from_log_coords(LogCoords::new(-0.2, -PI / 2.0, 0.0));
        assert_abs_diff_eq!(q.t, (-0.2f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn origin_has_no_log_coords() {
        assert!(matches!(
            to_log_coords(HPoint::origin()),
            Err(Error::OriginNotRepresentable)
        ));
    }

    #[test]
    fn norm_of_log_parametrization() {
        for &(xi, psi, eta) in &[(0.0, 0.3, 0.1), (1.2, -1.1, 2.0), (-0.5, 1.4, -3.0)] {
            let p = from_log_coords(LogCoords::new(xi, psi, eta));
            assert_abs_diff_eq!(heis_norm(p), (xi / 2.0).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn cylindrical_reference() {
        let c = to_cylindrical(pt(1.0, 1.0, 2.0));
        assert_abs_diff_eq!(c.r, 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.theta, PI / 4.0, epsilon = 1e-15);
        assert_eq!(c.t, 2.0);
        // degenerate-angle convention on the axis
        let a = to_cylindrical(pt(0.0, 0.0, 5.0));
        assert_eq!((a.r, a.theta, a.t), (0.0, 0.0, 5.0));
    }

    #[test]
    fn left_invariance_on_1000_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let mut draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            pt(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            )
        };
        for _ in 0..1000 {
            let g = draw(&mut rng);
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let d0 = heis_dist(p, q);
            let d1 = heis_dist(group_mul(g, p), group_mul(g, q));
            assert!((d0 - d1).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn associativity(
            coords in proptest::array::uniform9(-3.0f64..3.0)
        ) {
            let p = pt(coords[0], coords[1], coords[2]);
            let q = pt(coords[3], coords[4], coords[5]);
            let r = pt(coords[6], coords[7], coords[8]);
            let lhs = group_mul(group_mul(p, q), r);
            let rhs = group_mul(p, group_mul(q, r));
            prop_assert!((lhs.z - rhs.z).norm() < 1e-12);
            prop_assert!((lhs.t - rhs.t).abs() < 1e-12);
        }

        #[test]
        fn log_round_trip(
            xi in -2.0f64..2.0, // norm e^{xi/2} in (e^-1, e), inside (1/3, 3)
            psi in -1.55f64..1.55,
            eta in -10.0f64..10.0,
        ) {
            let p = from_log_coords(LogCoords::new(xi, psi, eta));
            let c = to_log_coords(p).unwrap();
            prop_assert!(c.in_window());
            let back = from_log_coords(c);
            prop_assert!((back.z - p.z).norm() < 1e-10);
            prop_assert!((back.t - p.t).abs() < 1e-10);
        }

        #[test]
        fn cylindrical_round_trip(
            x in -4.0f64..4.0, y in -4.0f64..4.0, t in -4.0f64..4.0,
        ) {
            let p = pt(x, y, t);
            let back = from_cylindrical(to_cylindrical(p));
            prop_assert!((back.z - p.z).norm() < 1e-12);
            prop_assert!(back.t == p.t);
        }
    }
}

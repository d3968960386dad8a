//! Named domains, membership predicates and seeded point sampling.
//!
//! Domains with axis points exclude a thin tube |z| < AXIS_TUBE from sampling;
//! the adapted quadratures in `moduli` handle the axis analytically.

use crate::field::Field;
use crate::heis::{self, HPoint, LogCoords};
use crate::C64;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

/// Radius of the tube around the vertical axis excluded from point sampling.
pub const AXIS_TUBE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// All of the group; sampling uses a centered box of the given half-width.
    All { half_width: f64 },
    /// Points with |z| above the axis tube, sampled from a centered box.
    AxisPunctured { half_width: f64 },
    /// Example-2 domain C: 0 < t < a, |z|^2 < b, 0 < arg z < c.
    CBox { a: f64, b: f64, c: f64 },
    /// Cylinder C_{a,b}: 0 < t < a, |z|^2 < b.
    Cylinder { a: f64, b: f64 },
    /// Cylindrical shell D_{a,b}: 0 < t < a, 1 < |z|^2 < b + 1.
    DShell { a: f64, b: f64 },
    /// Spherical annulus A_r: 1 < ||(z,t)|| < r.
    Annulus { r: f64 },
    /// Lifted rectangle: z in R_{a,b} and t + Im(z^2) in (0, c).
    LiftedBox { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub name: String,
    pub kind: DomainKind,
}

impl Domain {
    pub fn all() -> Self {
        Self { name: "H".into(), kind: DomainKind::All { half_width: 2.0 } }
    }

    pub fn axis_punctured() -> Self {
        Self {
            name: "H \\ axis".into(),
            kind: DomainKind::AxisPunctured { half_width: 2.0 },
        }
    }

    pub fn c_box(a: f64, b: f64, c: f64) -> Self {
        Self {
            name: format!("C(a={a}, b={b}, c={c})"),
            kind: DomainKind::CBox { a, b, c },
        }
    }

    pub fn cylinder(a: f64, b: f64) -> Self {
        Self {
            name: format!("C_{{{a},{b}}}"),
            kind: DomainKind::Cylinder { a, b },
        }
    }

    pub fn d_shell(a: f64, b: f64) -> Self {
        Self {
            name: format!("D_{{{a},{b}}}"),
            kind: DomainKind::DShell { a, b },
        }
    }

    pub fn annulus(r: f64) -> Self {
        Self { name: format!("A_{r}"), kind: DomainKind::Annulus { r } }
    }

    pub fn lifted_box(a: f64, b: f64, c: f64) -> Self {
        Self {
            name: format!("Omega(a={a}, b={b}, c={c})"),
            kind: DomainKind::LiftedBox { a, b, c },
        }
    }

    pub fn contains(&self, p: HPoint) -> bool {
        let r2 = p.z.norm_sqr();
        match self.kind {
            DomainKind::All { .. } => true,
            DomainKind::AxisPunctured { .. } => r2 > AXIS_TUBE * AXIS_TUBE,
            DomainKind::CBox { a, b, c } => {
                let theta = heis::to_cylindrical(p).theta;
                p.t > 0.0 && p.t < a && r2 < b && r2 > 0.0 && theta > 0.0 && theta < c
            }
            DomainKind::Cylinder { a, b } => p.t > 0.0 && p.t < a && r2 < b,
            DomainKind::DShell { a, b } => p.t > 0.0 && p.t < a && r2 > 1.0 && r2 < b + 1.0,
            DomainKind::Annulus { r } => {
                let n = heis::heis_norm(p);
                n > 1.0 && n < r
            }
            DomainKind::LiftedBox { a, b, c } => {
                let tau = p.t + (p.z * p.z).im;
                p.x() > 0.0 && p.x() < a && p.y() > 0.0 && p.y() < b && tau > 0.0 && tau < c
            }
        }
    }

    /// Draw n points from the interior, away from the axis tube.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<HPoint> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let p = self.sample_one(rng);
            if p.z.norm_sqr() > AXIS_TUBE * AXIS_TUBE {
                out.push(p);
            }
        }
        out
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> HPoint {
        match self.kind {
            DomainKind::All { half_width } | DomainKind::AxisPunctured { half_width } => {
                HPoint::from_parts(
                    rng.gen_range(-half_width..half_width),
                    rng.gen_range(-half_width..half_width),
                    rng.gen_range(-half_width..half_width),
                )
            }
            DomainKind::CBox { a, b, c } => {
                let r = (b * rng.gen_range(0.0..1.0f64)).sqrt();
                let theta = rng.gen_range(0.0..c);
                HPoint::new(C64::from_polar(r, theta), rng.gen_range(0.0..a))
            }
            DomainKind::Cylinder { a, b } => {
                let r = (b * rng.gen_range(0.0..1.0f64)).sqrt();
                let theta = rng.gen_range(0.0..2.0 * PI);
                HPoint::new(C64::from_polar(r, theta), rng.gen_range(0.0..a))
            }
            DomainKind::DShell { a, b } => {
                let r = rng.gen_range(1.0..b + 1.0f64).sqrt();
                let theta = rng.gen_range(0.0..2.0 * PI);
                HPoint::new(C64::from_polar(r, theta), rng.gen_range(0.0..a))
            }
            DomainKind::Annulus { r } => {
                let xi = rng.gen_range(0.0..2.0 * r.ln());
                let psi = rng.gen_range(-PI / 2.0..PI / 2.0);
                let eta = rng.gen_range(0.0..4.0 * PI / 3.0);
                heis::from_log_coords(LogCoords::new(xi, psi, eta))
            }
            DomainKind::LiftedBox { a, b, c } => {
                let x = rng.gen_range(0.0..a);
                let y = rng.gen_range(0.0..b);
                let tau = rng.gen_range(0.0..c);
                HPoint::from_parts(x, y, tau - 2.0 * x * y)
            }
        }
    }

    /// Deterministic n^3 interior grid (cell centers in adapted coordinates).
    pub fn grid(&self, n: usize) -> Vec<HPoint> {
        let ticks = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = match self.kind {
                        DomainKind::All { half_width }
                        | DomainKind::AxisPunctured { half_width } => HPoint::from_parts(
                            ticks(-half_width, half_width, i),
                            ticks(-half_width, half_width, j),
                            ticks(-half_width, half_width, k),
                        ),
                        DomainKind::CBox { a, b, c } => HPoint::new(
                            C64::from_polar(ticks(0.0, b, i).sqrt(), ticks(0.0, c, j)),
                            ticks(0.0, a, k),
                        ),
                        DomainKind::Cylinder { a, b } => HPoint::new(
                            C64::from_polar(ticks(0.0, b, i).sqrt(), ticks(0.0, 2.0 * PI, j)),
                            ticks(0.0, a, k),
                        ),
                        DomainKind::DShell { a, b } => HPoint::new(
                            C64::from_polar(ticks(1.0, b + 1.0, i).sqrt(), ticks(0.0, 2.0 * PI, j)),
                            ticks(0.0, a, k),
                        ),
                        DomainKind::Annulus { r } => heis::from_log_coords(LogCoords::new(
                            ticks(0.0, 2.0 * r.ln(), i),
                            ticks(-PI / 2.0, PI / 2.0, j),
                            ticks(0.0, 4.0 * PI / 3.0, k),
                        )),
                        DomainKind::LiftedBox { a, b, c } => {
                            let x = ticks(0.0, a, i);
                            let y = ticks(0.0, b, j);
                            HPoint::from_parts(x, y, ticks(0.0, c, k) - 2.0 * x * y)
                        }
                    };
                    if p.z.norm_sqr() > AXIS_TUBE * AXIS_TUBE {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

/// Domain sample from a fresh seeded generator; entry point for driver code
/// without its own RNG stack.
pub fn seeded_sample(domain: &Domain, n: usize, seed: u64) -> Vec<HPoint> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    domain.sample(&mut rng, n)
}

/// Seeded random polynomial plus box sample, for operator-relation reports.
pub fn seeded_polynomial_and_points(seed: u64, n_points: usize) -> (Field, Vec<HPoint>) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let f = random_polynomial(&mut rng, 3);
    let pts = random_points_box(&mut rng, n_points, 2.0);
    (f, pts)
}

/// Uniform points in a centered coordinate box, for operator-identity checks.
pub fn random_points_box<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Vec<HPoint> {
    (0..n)
        .map(|_| {
            HPoint::from_parts(
                rng.gen_range(-half_width..half_width),
                rng.gen_range(-half_width..half_width),
                rng.gen_range(-half_width..half_width),
            )
        })
        .collect()
}

/// Random polynomial in (z, zbar, t) with total degree at most `deg` and
/// small integer coefficients.
pub fn random_polynomial<R: Rng>(rng: &mut R, deg: u32) -> Field {
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=(deg - i) {
            for k in 0..=(deg - i - j) {
                if rng.gen_bool(0.6) {
                    let re = rng.gen_range(-3..=3) as f64;
                    let im = rng.gen_range(-3..=3) as f64;
                    if re != 0.0 || im != 0.0 {
                        terms.push((i, j, k, C64::new(re, im)));
                    }
                }
            }
        }
    }
    if terms.is_empty() {
        terms.push((1, 0, 0, C64::new(1.0, 0.0)));
    }
    Field::poly(&terms).with_name("random poly")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn membership_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [
            Domain::c_box(2.0, 1.0, PI / 2.0),
            Domain::cylinder(1.5, 2.0),
            Domain::d_shell(1.0, 3.0),
            Domain::annulus(2.5),
            Domain::lifted_box(2.0, 1.0, 1.0),
        ] {
            for p in d.sample(&mut rng, 200) {
                assert!(d.contains(p), "{} should contain {}", d.name, p);
            }
            for p in d.grid(6) {
                assert!(d.contains(p), "{} grid point {} outside", d.name, p);
            }
        }
    }

    #[test]
    fn annulus_excludes_inner_ball() {
        let d = Domain::annulus(3.0);
        assert!(!d.contains(HPoint::from_parts(0.5, 0.0, 0.0)));
        assert!(d.contains(HPoint::from_parts(1.5, 0.0, 0.0)));
        assert!(!d.contains(HPoint::from_parts(0.0, 0.0, 100.0)));
    }
}

//! Contact-map verification, Beltrami coefficient and distortion.
//!
//! For f = (f1, f2) the pulled-back contact form is
//! f*w = df2 - i conj(f1) df1 + i f1 d(conj f1); f is contact when the Z and
//! Zbar components vanish, with multiplier lambda = (f*w)(T). The Beltrami
//! coefficient is mu = Zbar f1 / Z f1 and the distortion
//! K = (|Zf1| + |Zbar f1|) / (|Zf1| - |Zbar f1|) = (1 + |mu|)/(1 - |mu|).

use crate::error::{Error, Result};
use crate::field::{Field, FirstOrder};
use crate::heis::HPoint;
use crate::sampling::Domain;
use crate::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const I: C64 = C64::new(0.0, 1.0);

/// Magnitude of Zf1 below which derivative-based quantities are refused.
pub const DERIVATIVE_FLOOR: f64 = 1e-9;

/// A map (f1, f2) of Heisenberg domains with exact jets; f2 is real-valued.
#[derive(Debug, Clone)]
pub struct ContactMap {
    pub f1: Field,
    pub f2: Field,
    pub name: String,
    pub inverse: Option<Box<ContactMap>>,
}

impl ContactMap {
    pub fn new(f1: Field, f2: Field, name: impl Into<String>) -> Self {
        Self { f1, f2, name: name.into(), inverse: None }
    }

    pub fn with_inverse(mut self, inv: ContactMap) -> Self {
        self.inverse = Some(Box::new(inv));
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.f1 = self.f1.with_domain(domain.clone());
        self.f2 = self.f2.with_domain(domain);
        self
    }

    pub fn domain(&self) -> &Domain {
        self.f1.domain()
    }

    pub fn apply(&self, p: HPoint) -> HPoint {
        HPoint::new(self.f1.eval(p), self.f2.eval(p).re)
    }

    /// Composition self o g as a new map with substituted expressions.
    pub fn compose(&self, g: &ContactMap) -> ContactMap {
        ContactMap {
            f1: self.f1.compose_with(g.f1.expr(), g.f2.expr()),
            f2: self.f2.compose_with(g.f1.expr(), g.f2.expr()),
            name: format!("{}∘{}", self.name, g.name),
            inverse: None,
        }
        .with_domain(g.domain().clone())
    }

    /// ((f*w)(Z), (f*w)(Zbar), lambda = (f*w)(T)) at p.
    pub fn contact_defect(&self, p: HPoint) -> (C64, C64, f64) {
        let d1 = FirstOrder::of(&self.f1, p);
        let d2 = FirstOrder::of(&self.f2, p);
        let dc = d1.conjugated();
        let along =
            |x2: C64, x1: C64, x1c: C64| -> C64 { x2 - I * d1.v.conj() * x1 + I * d1.v * x1c };
        let dz = along(d2.zf, d1.zf, dc.zf);
        let dzb = along(d2.zbf, d1.zbf, dc.zbf);
        let dt = along(d2.tf, d1.tf, dc.tf);
        (dz, dzb, dt.re)
    }

    /// Max contact defect over the points.
    pub fn max_contact_defect(&self, points: &[HPoint]) -> f64 {
        points
            .iter()
            .map(|&p| {
                let (a, b, _) = self.contact_defect(p);
                a.norm().max(b.norm())
            })
            .fold(0.0, f64::max)
    }

    /// Beltrami coefficient mu = Zbar f1 / Z f1 at p.
    pub fn beltrami(&self, p: HPoint) -> Result<C64> {
        let d = FirstOrder::of(&self.f1, p);
        if d.zf.norm() < DERIVATIVE_FLOOR {
            return Err(Error::DegenerateDerivative { point: p, magnitude: d.zf.norm() });
        }
        Ok(d.zbf / d.zf)
    }

    /// The CR combination f2 + i|f1|^2 whose Beltrami equation mirrors f1's.
    pub fn second_beltrami_field(&self) -> Field {
        &self.f2 + &crate::field::scale(I, &(&self.f1 * &self.f1.conj_field()))
    }

    /// Defect of the second Beltrami equation
    /// Zbar(f2 + i|f1|^2) = mu Z(f2 + i|f1|^2) at p.
    pub fn second_beltrami_defect(&self, p: HPoint) -> Result<f64> {
        let mu = self.beltrami(p)?;
        let g = self.second_beltrami_field();
        Ok((g.eval_zbar(p) - mu * g.eval_z(p)).norm())
    }

    /// Pointwise distortion K(p, f) >= 1; errors when |Zbar f1| >= |Zf1|
    /// (orientation not preserved there) or Zf1 degenerates.
    pub fn distortion(&self, p: HPoint) -> Result<f64> {
        let d = FirstOrder::of(&self.f1, p);
        let (zf1, zbf1) = (d.zf.norm(), d.zbf.norm());
        if zf1 < DERIVATIVE_FLOOR || zbf1 >= zf1 {
            return Err(Error::DegenerateDerivative { point: p, magnitude: zf1 });
        }
        Ok((zf1 + zbf1) / (zf1 - zbf1))
    }
}

/// Identity map (z, t) -> (z, t).
pub fn identity_map() -> ContactMap {
    ContactMap::new(Field::coord_z(), Field::coord_t(), "id")
}

/// Sampling plan for essential-supremum scans: an n^3 adapted grid plus
/// seeded random interior points. The result is a lower bound of the true
/// essential supremum.
#[derive(Debug, Clone)]
pub struct SupSampler {
    pub grid_n: usize,
    pub random_n: usize,
    pub seed: u64,
}

impl Default for SupSampler {
    fn default() -> Self {
        Self { grid_n: 64, random_n: 10_000, seed: 0xC0FFEE }
    }
}

impl SupSampler {
    pub fn points(&self, domain: &Domain) -> Vec<HPoint> {
        let mut pts = domain.grid(self.grid_n);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        pts.extend(domain.sample(&mut rng, self.random_n));
        pts
    }
}

/// Sampled maximal distortion over the map's domain (lower bound of the
/// essential sup). Points where the derivative degenerates are reported.
pub fn max_distortion(f: &ContactMap, sampler: &SupSampler) -> Result<f64> {
    let points = sampler.points(f.domain());
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|&p| f.distortion(p))
        .collect();
    let mut max = 1.0f64;
    for r in results {
        max = max.max(r?);
    }
    Ok(max)
}

/// Mean distortion integral K(p,f)^2 rho^4 dL^3 over the density's domain,
/// using the domain's adapted quadrature.
pub fn mean_distortion(
    f: &ContactMap,
    rho: &Density,
    nodes: usize,
) -> Result<f64> {
    let map = f.clone();
    crate::moduli::integrate_density_weighted(rho, nodes, move |p| {
        map.distortion(p).unwrap_or(f64::NAN).powi(2)
    })
}

/// Nonnegative weight on a domain, |gamma_1'|-integrated along curves and
/// L^3-integrated for energies.
#[derive(Debug, Clone)]
pub struct Density {
    pub rho: Field,
    pub name: String,
}

impl Density {
    pub fn new(rho: Field, name: impl Into<String>) -> Self {
        Self { rho, name: name.into() }
    }

    pub fn domain(&self) -> &Domain {
        self.rho.domain()
    }

    pub fn eval(&self, p: HPoint) -> f64 {
        self.rho.eval(p).re
    }

    pub fn scaled(&self, c: f64) -> Density {
        Density {
            rho: crate::field::scale(C64::new(c, 0.0), &self.rho),
            name: format!("{}*{}", c, self.name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::sampling;
    use rand::SeedableRng;

    fn pts(seed: u64, n: usize) -> Vec<HPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sampling::random_points_box(&mut rng, n, 1.5)
    }

    #[test]
    fn identity_is_contact_with_unit_multiplier() {
        let id = identity_map();
        for p in pts(1, 30) {
            let (a, b, lambda) = id.contact_defect(p);
            assert!(a.norm() < 1e-14 && b.norm() < 1e-14);
            assert!((lambda - 1.0).abs() < 1e-14);
            assert!(id.beltrami(p).unwrap().norm() < 1e-14);
            assert!((id.distortion(p).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn affine_stretch_constants() {
        // Example-1 map: mu = (A - B)/(A + B), lambda = AB, K = max/min
        let (a, b, c) = (2.0, 1.0, 1.0);
        let (ap, bp) = (3.0, 2.0);
        let cp = c * ap * bp / (a * b);
        let f = catalog::ex1_f0(a, b, c, ap, bp, cp).unwrap();
        let big_a = ap / a;
        let big_b = bp / b;
        for p in pts(2, 40) {
            let (dz, dzb, lambda) = f.map.contact_defect(p);
            assert!(dz.norm() < 1e-13 && dzb.norm() < 1e-13);
            assert!((lambda - big_a * big_b).abs() < 1e-13);
            let mu = f.map.beltrami(p).unwrap();
            let expected = (big_a - big_b) / (big_a + big_b);
            assert!((mu - C64::new(expected, 0.0)).norm() < 1e-13);
            let k = f.map.distortion(p).unwrap();
            let kexp = big_a.max(big_b) / big_a.min(big_b);
            assert!((k - kexp).abs() < 1e-12);
        }
    }

    #[test]
    fn distortion_equals_beltrami_form() {
        // c' = a' b c / (a b') keeps bc/a = b'c'/a'
        let f = catalog::ex2_f0(2.0, 1.0, 1.2, 1.0, 2.0, 0.3).unwrap();
        let domain = f.map.domain().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in domain.sample(&mut rng, 50) {
            let mu = f.map.beltrami(p).unwrap().norm();
            let k = f.map.distortion(p).unwrap();
            assert!((k - (1.0 + mu) / (1.0 - mu)).abs() < 1e-12);
            assert!(mu < 1.0);
        }
    }

    #[test]
    fn cr_chart_has_zero_beltrami() {
        // any CR diffeomorphism: rotation (e^{i theta} z, t)
        let rot = catalog::vertical_rotation(0.9);
        for p in pts(3, 30) {
            assert!(rot.beltrami(p).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn vertical_rotation_preserves_distortion() {
        let f = catalog::ex2_f0(2.0, 1.0, 1.0, 1.0, 2.0, 0.25).unwrap();
        let rot = catalog::vertical_rotation(1.3);
        let composed = rot.compose(&f.map);
        let domain = f.map.domain().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in domain.sample(&mut rng, 30) {
            let k1 = f.map.distortion(p).unwrap();
            let k2 = composed.distortion(p).unwrap();
            assert!((k1 - k2).abs() < 1e-12);
            let (a1, b1, _) = f.map.contact_defect(p);
            let (a2, b2, _) = composed.contact_defect(p);
            assert!((a1.norm() - a2.norm()).abs() < 1e-12);
            assert!((b1.norm() - b2.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn second_beltrami_equation_on_catalog_map() {
        let f = catalog::ex2_f0(2.0, 1.0, 1.0, 1.0, 2.0, 0.25).unwrap();
        let domain = f.map.domain().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in domain.sample(&mut rng, 40) {
            if f.map.f1.eval_z(p).norm() > 1e-6 {
                assert!(f.map.second_beltrami_defect(p).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn multiplier_is_real_for_catalog_maps() {
        // the T-component of f*w keeps its imaginary part below 1e-10
        let p2 = catalog::Params::default_for("ex2");
        let p3 = catalog::Params::default_for("ex3");
        let maps = [
            catalog::ex2_f0(p2.a, p2.b, p2.c, p2.a_p, p2.b_p, p2.c_p).unwrap().map,
            catalog::cyl_f0(2.0, 1.0, 1.0, 2.0).unwrap().map,
            catalog::radial_stretch(p3.a, p3.k).unwrap().map,
        ];
        for map in &maps {
            let d1 = |p| FirstOrder::of(&map.f1, p);
            let d2 = |p| FirstOrder::of(&map.f2, p);
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for p in map.domain().sample(&mut rng, 40) {
                let (a, b) = (d1(p), d2(p));
                let lambda = b.tf - I * a.v.conj() * a.tf + I * a.v * a.tf.conj();
                assert!(lambda.im.abs() < 1e-10, "{}: Im lambda = {}", map.name, lambda.im);
            }
        }
    }

    #[test]
    fn degenerate_derivative_is_an_error() {
        // z -> conj(z) reverses orientation: |Zbar f1| > |Z f1|
        let f = ContactMap::new(Field::coord_zbar(), -&Field::coord_t(), "flip");
        let p = HPoint::from_parts(0.5, 0.2, 0.1);
        assert!(matches!(
            f.distortion(p),
            Err(Error::DegenerateDerivative { .. })
        ));
    }
}

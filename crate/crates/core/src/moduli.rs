//! Curve-family admissibility, density energy, modulus bounds and the
//! quasiconformal modulus inequalities.
//!
//! The modulus of a Legendrian curve family is the infimum of
//! int rho^4 dL^3 over densities with int_gamma rho dl >= 1 on every curve.
//! The toolkit computes admissibility margins over a parameter grid and the
//! energy of a given density; for the catalog families the supplied densities
//! are the extremal ones, so the energies are the moduli themselves, but in
//! general `modulus_upper_bound` only bounds M from above.
//!
//! Volume quadratures run in domain-adapted coordinates: cylindrical with the
//! radial substitution u = r^(2/3) (which removes the |z|^(-1/3)-type density
//! singularities on the axis), logarithmic coordinates with the volume
//! element (3/4) e^(2 xi) d xi d psi d eta on annuli, and the sheared box on
//! lifted rectangles.

use crate::curves::LegendrianCurve;
use crate::error::{Error, Result};
use crate::heis::{from_log_coords, HPoint, LogCoords};
use crate::qc::{ContactMap, Density, SupSampler};
use crate::report::{InequalityCheck, ModulusReport, SCHEMA_VERSION};
use crate::sampling::{Domain, DomainKind};
use crate::{quadrature, C64};
use std::f64::consts::PI;
use std::sync::Arc;

pub type FamilyGenerator = Arc<dyn Fn(&[f64]) -> LegendrianCurve + Send + Sync>;

/// Family of Legendrian curves indexed by points of a parameter box.
#[derive(Clone)]
pub struct CurveFamily {
    pub name: String,
    pub ranges: Vec<(f64, f64)>,
    pub domain: Domain,
    generator: FamilyGenerator,
}

impl std::fmt::Debug for CurveFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CurveFamily({}, {} params)", self.name, self.ranges.len())
    }
}

impl CurveFamily {
    pub fn new(
        name: impl Into<String>,
        ranges: Vec<(f64, f64)>,
        domain: Domain,
        generator: FamilyGenerator,
    ) -> Self {
        Self { name: name.into(), ranges, domain, generator }
    }

    pub fn curve(&self, params: &[f64]) -> LegendrianCurve {
        (self.generator)(params)
    }

    /// Curves at the cell centers of an n-per-parameter tensor grid; the min
    /// over this grid stands in for the inf over the family.
    pub fn grid_curves(&self, n_per_param: usize) -> Vec<LegendrianCurve> {
        let mut out = Vec::new();
        let dims = self.ranges.len();
        let mut index = vec![0usize; dims];
        loop {
            let params: Vec<f64> = index
                .iter()
                .zip(&self.ranges)
                .map(|(&i, &(lo, hi))| lo + (hi - lo) * (i as f64 + 0.5) / n_per_param as f64)
                .collect();
            out.push(self.curve(&params));
            let mut d = 0;
            loop {
                if d == dims {
                    return out;
                }
                index[d] += 1;
                if index[d] < n_per_param {
                    break;
                }
                index[d] = 0;
                d += 1;
            }
        }
    }

    /// Image family under a contact map.
    pub fn mapped(&self, f: &ContactMap, target_domain: Domain) -> CurveFamily {
        let gen = self.generator.clone();
        let map = f.clone();
        CurveFamily {
            name: format!("{}({})", f.name, self.name),
            ranges: self.ranges.clone(),
            domain: target_domain,
            generator: Arc::new(move |params| gen(params).map_through(&map)),
        }
    }
}

/// Min over the sampled family of int_gamma rho dl; rho is admissible when
/// this is >= 1 (up to tolerance).
pub fn admissibility_margin(rho: &Density, fam: &CurveFamily, n_per_param: usize) -> f64 {
    fam.grid_curves(n_per_param)
        .iter()
        .map(|c| c.density_integral(rho))
        .fold(f64::INFINITY, f64::min)
}

/// Integral of weight(p) * rho(p)^4 over the density's domain in adapted
/// coordinates, with refinement-doubling convergence (relative 1e-7).
pub fn integrate_density_weighted(
    rho: &Density,
    nodes: usize,
    weight: impl Fn(HPoint) -> f64,
) -> Result<f64> {
    let rho4 = |p: HPoint| {
        let r = rho.eval(p);
        r * r * r * r
    };
    integrate_volume_converged(rho.domain(), nodes, |p| weight(p) * rho4(p))
}

/// Energy int rho^4 dL^3 of a density over its domain.
pub fn energy(rho: &Density, nodes: usize) -> Result<f64> {
    integrate_density_weighted(rho, nodes, |_| 1.0)
}

/// Volume integral of f over a structured domain in adapted coordinates.
pub fn integrate_volume(domain: &Domain, f: impl Fn(HPoint) -> f64, n: usize) -> f64 {
    match domain.kind {
        DomainKind::CBox { a, b, c } => cylindrical_integral(f, a, 0.0, b, c, n),
        DomainKind::Cylinder { a, b } => cylindrical_integral(f, a, 0.0, b, 2.0 * PI, n),
        DomainKind::DShell { a, b } => cylindrical_integral(f, a, 1.0, b + 1.0, 2.0 * PI, n),
        DomainKind::Annulus { r } => {
            let period = 4.0 * PI / 3.0;
            quadrature::integrate_box(
                |xi, psi, eta| {
                    let p = from_log_coords(LogCoords::new(xi, psi, eta));
                    0.75 * (2.0 * xi).exp() * f(p)
                },
                [0.0, -PI / 2.0, 0.0],
                [2.0 * r.ln(), PI / 2.0, period],
                n,
            )
        }
        DomainKind::LiftedBox { a, b, c } => quadrature::integrate_box(
            |x, y, tau| f(HPoint::from_parts(x, y, tau - 2.0 * x * y)),
            [0.0; 3],
            [a, b, c],
            n,
        ),
        DomainKind::All { .. } | DomainKind::AxisPunctured { .. } => {
            panic!("volume quadrature needs a bounded adapted domain")
        }
    }
}

/// Cylindrical integral over r^2 in (r2_lo, r2_hi), theta in (0, theta_max),
/// t in (0, a) with the Lebesgue element r dr dtheta dt, using the radial
/// substitution u = r^(2/3) (r dr = (3/2) u^2 du).
fn cylindrical_integral(
    f: impl Fn(HPoint) -> f64,
    a: f64,
    r2_lo: f64,
    r2_hi: f64,
    theta_max: f64,
    n: usize,
) -> f64 {
    let u_lo = r2_lo.powf(1.0 / 3.0);
    let u_hi = r2_hi.powf(1.0 / 3.0);
    quadrature::integrate_box(
        |u, theta, t| {
            let r = u.powf(1.5);
            let p = HPoint::new(C64::from_polar(r, theta), t);
            1.5 * u * u * f(p)
        },
        [u_lo, 0.0, 0.0],
        [u_hi, theta_max, a],
        n,
    )
}

fn integrate_volume_converged(
    domain: &Domain,
    n0: usize,
    f: impl Fn(HPoint) -> f64,
) -> Result<f64> {
    let rel_tol = 1e-7;
    let mut n = n0;
    let mut coarse = integrate_volume(domain, &f, n);
    for _ in 0..3 {
        n *= 2;
        let fine = integrate_volume(domain, &f, n);
        let diff = ((fine - coarse) / fine.abs().max(1e-300)).abs();
        if diff < rel_tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::QuadratureNotConverged {
        diff: ((coarse - integrate_volume(domain, &f, 2 * n)) / coarse.abs().max(1e-300)).abs(),
        tol: rel_tol,
    })
}

/// Energy of an admissible density: an upper bound for M(fam) by the
/// infimum definition of the modulus.
pub fn modulus_upper_bound(
    fam: &CurveFamily,
    rho: &Density,
    n_per_param: usize,
    nodes: usize,
    tol: f64,
) -> Result<f64> {
    let margin = admissibility_margin(rho, fam, n_per_param);
    if margin < 1.0 - tol {
        return Err(Error::NotAdmissible { margin });
    }
    energy(rho, nodes)
}

/// Settings for the modulus-inequality checks.
#[derive(Debug, Clone)]
pub struct InequalitySettings {
    pub nodes: usize,
    pub family_grid: usize,
    pub slack: f64,
    pub sampler: SupSampler,
}

impl Default for InequalitySettings {
    fn default() -> Self {
        Self {
            nodes: 16,
            family_grid: 8,
            slack: 1e-6,
            sampler: SupSampler { grid_n: 24, random_n: 2000, seed: 0xC0FFEE },
        }
    }
}

/// Check the three modulus-distortion inequalities for a quasiconformal map:
///
/// 1. M(Gamma)    <= int K(f^{-1}(x), f)^2 rho_dst^4 dL^3   (needs f.inverse)
/// 2. M(f(Gamma)) <= int K(p, f)^2 rho_src^4 dL^3
/// 3. M(Gamma)/K_f^2 <= M(f(Gamma)) <= K_f^2 M(Gamma)
///
/// with M(Gamma), M(f(Gamma)) taken as the energies of the supplied
/// densities (the catalog densities are extremal, so these are the moduli).
/// K_f is the sampled maximal distortion, a lower bound of the essential sup.
pub fn check_distortion_inequalities(
    f: &ContactMap,
    fam: &CurveFamily,
    rho_src: &Density,
    rho_dst: &Density,
    settings: &InequalitySettings,
) -> Result<ModulusReport> {
    let margin_src = admissibility_margin(rho_src, fam, settings.family_grid);
    if margin_src < 1.0 - settings.slack {
        return Err(Error::NotAdmissible { margin: margin_src });
    }
    let image = fam.mapped(f, rho_dst.domain().clone());
    let margin_dst = admissibility_margin(rho_dst, &image, settings.family_grid);
    if margin_dst < 1.0 - settings.slack {
        return Err(Error::NotAdmissible { margin: margin_dst });
    }

    let m_src = energy(rho_src, settings.nodes)?;
    let m_dst = energy(rho_dst, settings.nodes)?;
    let k_max = crate::qc::max_distortion(f, &settings.sampler)?;

    let mean_src = crate::qc::mean_distortion(f, rho_src, settings.nodes)?;
    let inv = f
        .inverse
        .as_deref()
        .expect("inequality (1) needs the inverse map");
    // K(f^{-1}(x), f) over the target domain
    let fwd = f.clone();
    let inv_map = inv.clone();
    let mean_dst = integrate_density_weighted(rho_dst, settings.nodes, move |x| {
        let p = inv_map.apply(x);
        fwd.distortion(p).unwrap_or(f64::NAN).powi(2)
    })?;

    let slack = settings.slack;
    let inequalities = vec![
        InequalityCheck {
            name: "M(G) <= int K(f^-1, f)^2 rho_dst^4".into(),
            lhs: m_src,
            rhs: mean_dst,
            holds: m_src <= mean_dst + slack,
        },
        InequalityCheck {
            name: "M(f(G)) <= int K(., f)^2 rho_src^4".into(),
            lhs: m_dst,
            rhs: mean_src,
            holds: m_dst <= mean_src + slack,
        },
        InequalityCheck {
            name: "M(G)/K^2 <= M(f(G))".into(),
            lhs: m_src / (k_max * k_max),
            rhs: m_dst,
            holds: m_src / (k_max * k_max) <= m_dst + slack,
        },
        InequalityCheck {
            name: "M(f(G)) <= K^2 M(G)".into(),
            lhs: m_dst,
            rhs: k_max * k_max * m_src,
            holds: m_dst <= k_max * k_max * m_src + slack,
        },
    ];
    Ok(ModulusReport {
        schema: SCHEMA_VERSION,
        family: fam.name.clone(),
        density: rho_src.name.clone(),
        margin: margin_src,
        energy: m_src,
        modulus_upper_bound: Some(m_src),
        inequalities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::field::Field;

    #[test]
    fn unit_density_energy_is_volume() {
        // box (x,y,tau) of volume a*b*c, sheared into the lifted rectangle
        let d = Domain::lifted_box(2.0, 1.5, 0.5);
        let rho = Density::new(
            Field::constant(C64::new(1.0, 0.0)).with_domain(d),
            "1",
        );
        let e = energy(&rho, 8).unwrap();
        assert!((e - 1.5).abs() < 1e-10, "{e}");
    }

    #[test]
    fn energy_scales_with_fourth_power() {
        let (a, b, c) = (2.0, 1.0, PI / 2.0);
        let rho = catalog::ex2_rho0(a, b, c);
        let e1 = energy(&rho, 8).unwrap();
        let e2 = energy(&rho.scaled(2.0), 8).unwrap();
        assert!((e2 / e1 - 16.0).abs() < 1e-9);
    }

    #[test]
    fn example2_modulus_value() {
        // int rho0^4 over C(a,b,c) = 8ac/27b
        for (a, b, c) in [(2.0, 1.0, PI / 2.0), (1.0, 4.0, 1.0), (3.0, 2.0, PI)] {
            let rho = catalog::ex2_rho0(a, b, c);
            let e = energy(&rho, 8).unwrap();
            let expected = 8.0 * a * c / (27.0 * b);
            assert!(
                ((e - expected) / expected).abs() < 1e-6,
                "({a},{b},{c}): {e} vs {expected}"
            );
        }
    }

    #[test]
    fn example2_radii_admissibility_is_exactly_one() {
        let (a, b, c) = (2.0, 1.0, PI / 2.0);
        let fam = catalog::ex2_radii_family(a, b, c);
        let rho = catalog::ex2_rho0(a, b, c);
        let margin = admissibility_margin(&rho, &fam, 8);
        assert!((margin - 1.0).abs() < 1e-9, "margin {margin}");
        // doubled density doubles the margin; zero density is inadmissible
        let margin2 = admissibility_margin(&rho.scaled(2.0), &fam, 8);
        assert!((margin2 - 2.0).abs() < 1e-9);
        let zero = Density::new(
            Field::constant(C64::new(0.0, 0.0)).with_domain(rho.domain().clone()),
            "0",
        );
        assert_eq!(admissibility_margin(&zero, &fam, 4), 0.0);
        assert!(matches!(
            modulus_upper_bound(&fam, &zero, 4, 8, 1e-9),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn margin_is_monotone_and_grid_stable() {
        let (a, b, c) = (2.0, 1.0, PI / 2.0);
        let fam = catalog::ex2_radii_family(a, b, c);
        let rho = catalog::ex2_rho0(a, b, c);
        let m8 = admissibility_margin(&rho, &fam, 8);
        let m16 = admissibility_margin(&rho, &fam, 16);
        assert!((m8 - m16).abs() < 1e-4);
        let bigger = admissibility_margin(&rho.scaled(1.5), &fam, 8);
        assert!(bigger >= m8);
    }

    #[test]
    fn modulus_upper_bound_for_radii() {
        let (a, b, c) = (2.0, 1.0, PI / 2.0);
        let fam = catalog::ex2_radii_family(a, b, c);
        let rho = catalog::ex2_rho0(a, b, c);
        let m = modulus_upper_bound(&fam, &rho, 8, 8, 1e-9).unwrap();
        let expected = 8.0 * a * c / (27.0 * b);
        assert!(((m - expected) / expected).abs() < 1e-6);
    }

    #[test]
    fn annulus_energy_closed_form() {
        // rho = sqrt(|q|)/(2 log a) on A_a integrates to pi^2 / (log a)^3;
        // oracle: the separable integral (3/4) e^{2xi} cos^2(psi) e^{-2xi}
        //         / log^4(a) over the coordinate box
        let a: f64 = 2.5;
        let rho = catalog::ex3_rho(a);
        let e = energy(&rho, 8).unwrap();
        let l = a.ln();
        let oracle = (3.0 / (4.0 * l.powi(4)))
            * (2.0 * l)
            * quadrature::integrate(|psi: f64| psi.cos().powi(2), -PI / 2.0, PI / 2.0, 32)
            * (4.0 * PI / 3.0);
        assert!(((e - oracle) / oracle).abs() < 1e-7, "{e} vs {oracle}");
        let closed = PI * PI / l.powi(3);
        assert!(((e - closed) / closed).abs() < 1e-7, "{e} vs {closed}");
    }

    #[test]
    fn rough_integrand_fails_convergence() {
        // indicator-like density: refinement levels keep disagreeing
        let d = Domain::cylinder(1.0, 1.0);
        let rho = Density::new(
            Field::new(
                crate::expr::atan(crate::expr::mul(
                    crate::expr::cst_re(1e8),
                    crate::expr::sin(crate::expr::mul(crate::expr::cst_re(57.3), crate::expr::var_t())),
                )),
                "chatter",
            )
            .with_domain(d),
            "chatter",
        );
        assert!(matches!(
            energy(&rho, 4),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }

    #[test]
    fn identity_map_gives_equalities() {
        let (a, b, c) = (2.0, 1.0, PI / 2.0);
        let fam = catalog::ex2_radii_family(a, b, c);
        let rho = catalog::ex2_rho0(a, b, c);
        let id = catalog::identity_map()
            .with_domain(rho.domain().clone())
            .with_inverse(catalog::identity_map().with_domain(rho.domain().clone()));
        let settings = InequalitySettings {
            nodes: 8,
            family_grid: 6,
            slack: 1e-6,
            sampler: SupSampler { grid_n: 8, random_n: 100, seed: 1 },
        };
        let report = check_distortion_inequalities(&id, &fam, &rho, &rho, &settings).unwrap();
        for ineq in &report.inequalities {
            assert!(ineq.holds, "{}: {} vs {}", ineq.name, ineq.lhs, ineq.rhs);
            assert!((ineq.lhs - ineq.rhs).abs() < 1e-6);
        }
    }
}

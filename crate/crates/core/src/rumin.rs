//! Split Rumin operators on coordinate representatives of (p,q)-forms.
//!
//! Coefficients are stored relative to the canonical coframes
//!
//! ```text
//! (0,0): f            (1,0): [f dz]_w        (0,1): [f dzbar]_w
//! (1,1): f dzbar ^ w  (2,0): f dz ^ w        (2,1): f dz ^ dzbar ^ w
//! ```
//!
//! where w = dt - i zbar dz + i z dzbar is the contact form. Operator outputs
//! that appear naturally against w ^ dz or w ^ dzbar are converted on
//! construction (a single sign flip), so no sign bookkeeping leaks out.

use crate::error::{Error, Result};
#[cfg(test)]
use crate::expr;
use crate::field::{scale, Field};
use crate::heis::HPoint;
use crate::quadrature;
use crate::C64;
use std::collections::BTreeMap;

const I: C64 = C64::new(0.0, 1.0);
/// 1/(2i)
const HALF_OVER_I: C64 = C64::new(0.0, -0.5);

/// Bidegree-tagged coefficient field relative to the canonical coframe.
#[derive(Debug, Clone)]
pub struct FormPQ {
    pub p: u8,
    pub q: u8,
    pub coeff: Field,
}

impl FormPQ {
    pub fn new(p: u8, q: u8, coeff: Field) -> Self {
        assert!(
            matches!((p, q), (0, 0) | (1, 0) | (0, 1) | (1, 1) | (2, 0) | (2, 1)),
            "no (p,q)-forms of bidegree ({p},{q})"
        );
        Self { p, q, coeff }
    }

    pub fn form10(coeff: Field) -> Self {
        Self::new(1, 0, coeff)
    }

    pub fn form01(coeff: Field) -> Self {
        Self::new(0, 1, coeff)
    }

    /// (1,1)-form given its coefficient relative to w ^ dzbar = -dzbar ^ w.
    pub fn form11_from_omega_frame(coeff: Field) -> Self {
        Self::new(1, 1, -&coeff)
    }

    /// (2,0)-form given its coefficient relative to w ^ dz = -dz ^ w.
    pub fn form20_from_omega_frame(coeff: Field) -> Self {
        Self::new(2, 0, -&coeff)
    }

    /// Coefficient relative to the opposite frame order (w first).
    pub fn coeff_in_omega_frame(&self) -> Field {
        match (self.p, self.q) {
            (1, 1) | (2, 0) => -&self.coeff,
            _ => self.coeff.clone(),
        }
    }

    pub fn frame_name(&self) -> &'static str {
        match (self.p, self.q) {
            (0, 0) => "1",
            (1, 0) => "[dz]_w",
            (0, 1) => "[dzbar]_w",
            (1, 1) => "dzbar^w",
            (2, 0) => "dz^w",
            (2, 1) => "dz^dzbar^w",
            _ => unreachable!(),
        }
    }
}

/// d'f = [Zf dz]_w.
pub fn dprime_scalar(f: &Field) -> FormPQ {
    FormPQ::form10(f.z_field())
}

/// d''f = [Zbar f dzbar]_w.
pub fn dsecond_scalar(f: &Field) -> FormPQ {
    FormPQ::form01(f.zbar_field())
}

/// Rumin D on a (1,0)-form, via the unique representative
/// f dz + (1/2i) Zbar f w:
/// D'[f dz]_w = ((1/2i) Z Zbar f - Tf) dz ^ w  and
/// D''[f dz]_w = (1/2i) Zbar^2 f dzbar ^ w.
pub fn rumin_d(alpha: &FormPQ) -> (FormPQ, FormPQ) {
    assert_eq!((alpha.p, alpha.q), (1, 0));
    let f = &alpha.coeff;
    let dprime = &scale(HALF_OVER_I, &f.zbar_field().z_field()) - &f.t_field();
    let dsecond = scale(HALF_OVER_I, &f.zbar_field().zbar_field());
    (FormPQ::new(2, 0, dprime), FormPQ::new(1, 1, dsecond))
}

/// Rumin D on a (0,1)-form:
/// D'[f dzbar]_w = ((1/2i) Zbar Z f + Tf) w ^ dzbar  and
/// D+[f dzbar]_w = (1/2i) Z^2 f w ^ dz,
/// both stored against the canonical frames (one sign flip each).
pub fn rumin_d_01(alpha: &FormPQ) -> (FormPQ, FormPQ) {
    assert_eq!((alpha.p, alpha.q), (0, 1));
    let f = &alpha.coeff;
    let dprime = &scale(HALF_OVER_I, &f.z_field().zbar_field()) + &f.t_field();
    let dplus = scale(HALF_OVER_I, &f.z_field().z_field());
    (
        FormPQ::form11_from_omega_frame(dprime),
        FormPQ::form20_from_omega_frame(dplus),
    )
}

/// d'(f dzbar ^ w) = Zf dz ^ dzbar ^ w.
pub fn dprime_f11(beta: &FormPQ) -> FormPQ {
    assert_eq!((beta.p, beta.q), (1, 1));
    FormPQ::new(2, 1, beta.coeff.z_field())
}

/// d''(f dz ^ w) = -Zbar f dz ^ dzbar ^ w.
pub fn dsecond_f20(beta: &FormPQ) -> FormPQ {
    assert_eq!((beta.p, beta.q), (2, 0));
    FormPQ::new(2, 1, -&beta.coeff.zbar_field())
}

/// Max absolute defect of each composable operator relation over the points.
///
/// The four nontrivial bidegree components of D d_p = 0 and d_p D = 0 are
/// evaluated; the remaining components vanish structurally (D'' on (0,1),
/// D+ on (1,0), d'' on (1,1), d' on (2,0) do not exist).
pub fn identity_suite(f: &Field, points: &[HPoint]) -> BTreeMap<String, f64> {
    let d_prime_f = dprime_scalar(f);
    let d_second_f = dsecond_scalar(f);
    let (dp_of_dprime, dpp_of_dprime) = rumin_d(&d_prime_f);
    let (dprime_of_dsecond, dplus_of_dsecond) = rumin_d_01(&d_second_f);

    // D d_p f = 0, split by bidegree
    let f11 = &dpp_of_dprime.coeff + &dprime_of_dsecond.coeff;
    let f20 = &dp_of_dprime.coeff + &dplus_of_dsecond.coeff;

    // d_p D alpha = 0 for alpha in E^{1,0} and E^{0,1} with coefficient f
    let alpha10 = FormPQ::form10(f.clone());
    let (a_dp, a_dpp) = rumin_d(&alpha10);
    let e10 = &dsecond_f20(&a_dp).coeff + &dprime_f11(&a_dpp).coeff;

    let alpha01 = FormPQ::form01(f.clone());
    let (b_dp, b_dplus) = rumin_d_01(&alpha01);
    let e01 = &dprime_f11(&b_dp).coeff + &dsecond_f20(&b_dplus).coeff;

    let max_abs = |g: &Field| {
        points
            .iter()
            .map(|&p| g.eval(p).norm())
            .fold(0.0, f64::max)
    };
    let mut report = BTreeMap::new();
    report.insert("D''d' + D'd'' (scalars)".to_string(), max_abs(&f11));
    report.insert("D'd' + D+d'' (scalars)".to_string(), max_abs(&f20));
    report.insert("d''D' + d'D'' (E^{1,0})".to_string(), max_abs(&e10));
    report.insert("d'D' + d''D+ (E^{0,1})".to_string(), max_abs(&e01));
    report
}

/// Closedness defect max(|D' alpha|, |D'' alpha|) over the points.
pub fn closedness_defect(alpha: &FormPQ, points: &[HPoint]) -> f64 {
    let (dp, dpp) = rumin_d(alpha);
    points
        .iter()
        .map(|&p| dp.coeff.eval(p).norm().max(dpp.coeff.eval(p).norm()))
        .fold(0.0, f64::max)
}

/// Primitive of a D-closed (1,0)-form by path integration of the unique
/// representative f dz + (1/2i) Zbar f w along a polyline from `base`
/// through `via` to `target`. Returns F with F(base) = 0, ZF = f, Zbar F = 0.
pub fn primitive_of_closed_form10(
    alpha: &FormPQ,
    base: HPoint,
    target: HPoint,
    via: &[HPoint],
    tol: f64,
) -> Result<C64> {
    assert_eq!((alpha.p, alpha.q), (1, 0));
    let mut waypoints = vec![base];
    waypoints.extend_from_slice(via);
    waypoints.push(target);

    for &p in &waypoints {
        if alpha.coeff.check_domain(p).is_err() {
            return Err(Error::PathOutsideDomain(p));
        }
    }
    let defect = closedness_defect(alpha, &waypoints);
    if defect > tol {
        return Err(Error::NotClosed { point: base, defect });
    }

    let f = &alpha.coeff;
    let w = scale(HALF_OVER_I, &f.zbar_field());
    let total: C64 = waypoints
        .windows(2)
        .map(|seg| integrate_segment_complex(f, &w, seg[0], seg[1]))
        .sum();
    Ok(total)
}

/// Integral of f dz + w (dt - i zbar dz + i z dzbar) over one straight
/// segment, 16-node Gauss-Legendre.
fn integrate_segment_complex(f: &Field, w: &Field, p0: HPoint, p1: HPoint) -> C64 {
    let dz = p1.z - p0.z;
    let dt = p1.t - p0.t;
    let (xs, ws) = quadrature::gauss_legendre(16);
    let mut acc = C64::new(0.0, 0.0);
    for (x, wt) in xs.iter().zip(&ws) {
        let s = 0.5 * (x + 1.0);
        let p = HPoint::new(p0.z + s * dz, p0.t + s * dt);
        let fv = f.eval(p);
        let wv = w.eval(p);
        // 1-form coefficients against dz, dzbar, dt
        let a = fv - I * p.z.conj() * wv;
        let b = I * p.z * wv;
        acc += wt * (a * dz + b * dz.conj() + wv * dt);
    }
    acc * 0.5
}

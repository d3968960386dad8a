//! Quadratic differentials and k-forms with the holomorphy operators
//! D2', D2'', B2, Dk', Dk'', Bk, contact pull-backs, naturality checks and
//! the natural-chart construction.
//!
//! A quadratic differential is the class [q dz^2]_w of its coefficient field;
//! the operators act on it by
//!
//! ```text
//! D2'  q = 2 q Z Zbar q - Zq Zbar q - 4i q Tq
//! D2'' q = 2 q Zbar^2 q - (Zbar q)^2
//! B2   q = Zbar(|q|^2) + conj(q) Zbar q
//! ```
//!
//! and on k-forms by the degree-k versions. The output frames
//! ([dz^3]_w (x) w^dz and so on) are bookkeeping only; no algebra is done on
//! them. Any q = (Zf)^2 with f CR annihilates D2' and D2''; B2 additionally
//! vanishes exactly when f extends to the complex part of a chart. The
//! degree-2 k-form operators coincide with D2'/D2'' (same constants; the two
//! presentations agree term by term, which `k_form_operators_match_quadratic_case`
//! pins down).

use crate::error::{Error, Result};
use crate::field::{scale, Field};
use crate::heis::HPoint;
use crate::qc::ContactMap;
use crate::rumin;
use crate::sampling::Domain;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Quadratic differential [q dz^2]_w on a Heisenberg domain.
#[derive(Debug, Clone)]
pub struct QuadDiff {
    pub coeff: Field,
    pub name: String,
}

impl QuadDiff {
    pub fn new(coeff: Field, name: impl Into<String>) -> Self {
        Self { coeff, name: name.into() }
    }

    pub fn domain(&self) -> &Domain {
        self.coeff.domain()
    }

    pub fn eval(&self, p: HPoint) -> C64 {
        self.coeff.eval(p)
    }

    /// q(gamma'(s)) = q(gamma(s)) * (dgamma_1/ds)^2, the value tested for the
    /// trajectory sign condition.
    pub fn on_velocity(&self, p: HPoint, vel_z: C64) -> C64 {
        self.eval(p) * vel_z * vel_z
    }

    pub fn as_kform(&self) -> KForm {
        KForm { degree: 2, coeff: self.coeff.clone(), name: self.name.clone() }
    }
}

/// Form of degree k >= 2, the class [alpha dz^k]_w.
#[derive(Debug, Clone)]
pub struct KForm {
    pub degree: u32,
    pub coeff: Field,
    pub name: String,
}

impl KForm {
    pub fn new(degree: u32, coeff: Field, name: impl Into<String>) -> Self {
        assert!(degree >= 2, "k-forms need degree k >= 2");
        Self { degree, coeff, name: name.into() }
    }
}

/// D2' coefficient field, against [dz^3]_w (x) w ^ dz.
pub fn d2prime(q: &QuadDiff) -> Field {
    let f = &q.coeff;
    let a = &scale(C64::new(2.0, 0.0), f) * &f.zbar_field().z_field();
    let b = &f.z_field() * &f.zbar_field();
    let c = &scale(4.0 * I, f) * &f.t_field();
    (&(&a - &b) - &c).with_name(format!("D2'({})", q.name))
}

/// D2'' coefficient field, against [dz^3]_w (x) w ^ dzbar.
pub fn d2second(q: &QuadDiff) -> Field {
    let f = &q.coeff;
    let a = &scale(C64::new(2.0, 0.0), f) * &f.zbar_field().zbar_field();
    let b = {
        let zb = f.zbar_field();
        &zb * &zb
    };
    (&a - &b).with_name(format!("D2''({})", q.name))
}

/// B2 coefficient field Zbar(|q|^2) + conj(q) Zbar q, against w ^ dzbar (x) w.
///
/// The scalar form is equivalent to the chart-compatibility condition
/// Zbar(|Zf|^2) = -2i Tf conj(Zf) for q = (Zf)^2 only where q does not
/// vanish (the equivalence multiplies through by 2 q conj(q)); at zeros of q
/// the formula below is evaluated as-is and carries no information.
pub fn b2(q: &QuadDiff) -> Field {
    let f = &q.coeff;
    let abs2 = f * &f.conj_field();
    (&abs2.zbar_field() + &(&f.conj_field() * &f.zbar_field()))
        .with_name(format!("B2({})", q.name))
}

/// Dk' coefficient: k a Z Zbar a + (1-k) Za Zbar a - 2ik a Ta.
pub fn dkprime(a: &KForm) -> Field {
    let k = a.degree as f64;
    let f = &a.coeff;
    let t1 = &scale(C64::new(k, 0.0), f) * &f.zbar_field().z_field();
    let t2 = scale(C64::new(1.0 - k, 0.0), &(&f.z_field() * &f.zbar_field()));
    let t3 = &scale(2.0 * k * I, f) * &f.t_field();
    (&(&t1 + &t2) - &t3).with_name(format!("D{}'({})", a.degree, a.name))
}

/// Dk'' coefficient: k a Zbar^2 a + (1-k)(Zbar a)^2.
pub fn dksecond(a: &KForm) -> Field {
    let k = a.degree as f64;
    let f = &a.coeff;
    let t1 = &scale(C64::new(k, 0.0), f) * &f.zbar_field().zbar_field();
    let zb = f.zbar_field();
    let t2 = scale(C64::new(1.0 - k, 0.0), &(&zb * &zb));
    (&t1 + &t2).with_name(format!("D{}''({})", a.degree, a.name))
}

/// Bk coefficient: Zbar(|a|^2) + conj(a) Zbar a, the same scalar as B2.
pub fn bk(a: &KForm) -> Field {
    let f = &a.coeff;
    let abs2 = f * &f.conj_field();
    (&abs2.zbar_field() + &(&f.conj_field() * &f.zbar_field()))
        .with_name(format!("B{}({})", a.degree, a.name))
}

/// Pull-back g*q with coefficient (q o g)(Z g_1)^2.
///
/// Fails with NotContact when the contact defect of g exceeds `tol` on the
/// probe points.
pub fn pullback(q: &QuadDiff, g: &ContactMap, tol: f64, probe: &[HPoint]) -> Result<QuadDiff> {
    for &p in probe {
        let (dz, dzb, _) = g.contact_defect(p);
        let defect = dz.norm().max(dzb.norm());
        if defect > tol {
            return Err(Error::NotContact { point: p, defect });
        }
    }
    let composed = q.coeff.compose_with(g.f1.expr(), g.f2.expr());
    let zg1 = g.f1.z_field();
    let coeff = &composed * &(&zg1 * &zg1);
    Ok(QuadDiff::new(
        coeff.with_domain(g.f1.domain().clone()),
        format!("{}*({})", g.name, q.name),
    ))
}

/// Max defect of the transported identity D2''(g*q) = g*(D2'' q) over the
/// points, with the frame factor (Zg1)^3 conj(Zg1) |Zg1|^2.
pub fn naturality_defect(
    q: &QuadDiff,
    g: &ContactMap,
    points: &[HPoint],
    tol: f64,
) -> Result<f64> {
    let pulled = pullback(q, g, tol, points)?;
    let lhs = d2second(&pulled);
    let rhs_field = d2second(q);
    let mut max = 0.0f64;
    for &p in points {
        let zg1 = g.f1.eval_z(p);
        let factor = zg1.powi(3) * zg1.conj() * zg1.norm_sqr();
        let rhs = rhs_field.eval(g.apply(p)) * factor;
        max = max.max((lhs.eval(p) - rhs).norm());
    }
    Ok(max)
}

/// Floor below which the square-root branch of q cannot be tracked.
pub const BRANCH_FLOOR: f64 = 1e-9;

/// Natural chart for a differential with vanishing D2', D2'' and B2:
/// components (f, h) with q = (Zf)^2, Zbar f = 0 and (f, h) contact,
/// normalized to (0, 0) at the base. Values come from path integration;
/// the square root of q is continued along the path by sign tracking.
pub struct NaturalChart {
    pub base: HPoint,
    q: QuadDiff,
    sign: f64,
    steps_per_unit: usize,
}

/// Verify the operator preconditions on the neighborhood sample and
/// q(base) != 0, then set up the chart. `branch_sign` picks the square-root
/// branch at the base, realizing the +- chart ambiguity.
pub fn natural_chart(
    q: &QuadDiff,
    base: HPoint,
    neighborhood: &[HPoint],
    branch_sign: f64,
    tol: f64,
) -> Result<NaturalChart> {
    if q.eval(base).norm() < BRANCH_FLOOR {
        return Err(Error::ZeroAtBase);
    }
    let checks: [(&'static str, Field); 3] =
        [("D2'", d2prime(q)), ("D2''", d2second(q)), ("B2", b2(q))];
    for (operator, field) in checks {
        let defect = neighborhood
            .iter()
            .map(|&p| field.eval(p).norm())
            .fold(0.0, f64::max);
        if defect > tol {
            return Err(Error::OperatorsNonzero { operator, defect });
        }
    }
    Ok(NaturalChart {
        base,
        q: q.clone(),
        sign: branch_sign.signum(),
        steps_per_unit: 2048,
    })
}

impl NaturalChart {
    /// Chart components (f, h) at `target`, integrating along the polyline
    /// base -> via... -> target.
    ///
    /// f solves df = u dz + (1/2i)(Zbar u) w with u the tracked sqrt(q);
    /// h integrates the closed real form
    /// i conj(f) u dz - i f conj(u) dzbar + (|u|^2 + i conj(f) Tf - i f conj(Tf)) w,
    /// which needs the running value of f, so both integrate together.
    pub fn eval_via(&self, target: HPoint, via: &[HPoint]) -> Result<(C64, f64)> {
        let mut waypoints = vec![self.base];
        waypoints.extend_from_slice(via);
        waypoints.push(target);

        let qzb = self.q.coeff.zbar_field();

        let mut f = C64::new(0.0, 0.0);
        let mut h = 0.0f64;
        let mut root_sign = self.sign;
        let mut prev_sqrt = self.q.eval(self.base).sqrt() * root_sign;

        for seg in waypoints.windows(2) {
            let (p0, p1) = (seg[0], seg[1]);
            let dz = p1.z - p0.z;
            let dt = p1.t - p0.t;
            let seg_len = (dz.norm_sqr() + dt * dt).sqrt();
            let n = ((seg_len * self.steps_per_unit as f64).ceil() as usize).max(64);
            let step = 1.0 / n as f64;

            let rhs = |s: f64, fv: C64, u: C64| -> (C64, f64) {
                let p = HPoint::new(p0.z + s * dz, p0.t + s * dt);
                // Tf = (1/2i) Zbar u = Zbar q / (4i u)
                let v = qzb.eval(p) / (4.0 * I * u);
                let a = u - I * p.z.conj() * v;
                let b = I * p.z * v;
                let df = a * dz + b * dz.conj() + v * dt;
                let wre = u.norm_sqr() + (I * fv.conj() * v - I * fv * v.conj()).re;
                let ba = I * fv.conj() * u - I * p.z.conj() * wre;
                let bb = -I * fv * u.conj() + I * p.z * wre;
                let dh = (ba * dz + bb * dz.conj() + C64::new(wre, 0.0) * dt).re;
                (df, dh)
            };

            let sqrt_at = |s: f64, prev: &mut C64, sign: &mut f64| -> Result<C64> {
                let p = HPoint::new(p0.z + s * dz, p0.t + s * dt);
                let qv = self.q.eval(p);
                if qv.norm() < BRANCH_FLOOR {
                    return Err(Error::BranchCutCrossed { magnitude: qv.norm() });
                }
                let cand = qv.sqrt() * *sign;
                let chosen = if (cand - *prev).norm() <= (cand + *prev).norm() {
                    cand
                } else {
                    *sign = -*sign;
                    -cand
                };
                *prev = chosen;
                Ok(chosen)
            };

            for i in 0..n {
                let s0 = i as f64 * step;
                let u0 = sqrt_at(s0, &mut prev_sqrt, &mut root_sign)?;
                let (k1f, k1h) = rhs(s0, f, u0);
                let um = sqrt_at(s0 + 0.5 * step, &mut prev_sqrt, &mut root_sign)?;
                let (k2f, k2h) = rhs(s0 + 0.5 * step, f + 0.5 * step * k1f, um);
                let (k3f, k3h) = rhs(s0 + 0.5 * step, f + 0.5 * step * k2f, um);
                let u1 = sqrt_at(s0 + step, &mut prev_sqrt, &mut root_sign)?;
                let (k4f, k4h) = rhs(s0 + step, f + step * k3f, u1);
                f += step / 6.0 * (k1f + 2.0 * (k2f + k3f) + k4f);
                h += step / 6.0 * (k1h + 2.0 * (k2h + k3h) + k4h);
            }
        }
        Ok((f, h))
    }

    /// Chart components along the default two-segment path through
    /// (base.z, target.t).
    pub fn eval(&self, target: HPoint) -> Result<(C64, f64)> {
        let mid = HPoint::new(self.base.z, target.t);
        self.eval_via(target, &[mid])
    }

    pub fn root_at_base(&self) -> C64 {
        self.q.eval(self.base).sqrt() * self.sign
    }
}

/// Central-difference defects of (Zf)^2 = q and Zbar f = 0 for the assembled
/// chart values on probe points; independent of the analytic derivative data
/// that drives the integration.
pub fn chart_fd_defects(
    chart: &NaturalChart,
    q: &QuadDiff,
    probes: &[HPoint],
    h: f64,
) -> Result<(f64, f64)> {
    let mut max_sq = 0.0f64;
    let mut max_cr = 0.0f64;
    for &p in probes {
        let fxp = chart.eval(HPoint::new(p.z + h, p.t))?.0;
        let fxm = chart.eval(HPoint::new(p.z - h, p.t))?.0;
        let fyp = chart.eval(HPoint::new(p.z + C64::new(0.0, h), p.t))?.0;
        let fym = chart.eval(HPoint::new(p.z - C64::new(0.0, h), p.t))?.0;
        let ftp = chart.eval(HPoint::new(p.z, p.t + h))?.0;
        let ftm = chart.eval(HPoint::new(p.z, p.t - h))?.0;
        let fx = (fxp - fxm) / (2.0 * h);
        let fy = (fyp - fym) / (2.0 * h);
        let ft = (ftp - ftm) / (2.0 * h);
        let dz = (fx - I * fy) / 2.0;
        let dzb = (fx + I * fy) / 2.0;
        let zf = dz + I * p.z.conj() * ft;
        let zbf = dzb - I * p.z * ft;
        max_sq = max_sq.max((zf * zf - q.eval(p)).norm());
        max_cr = max_cr.max(zbf.norm());
    }
    Ok((max_sq, max_cr))
}

/// Max of |field| over the points; used for annihilation reports.
pub fn max_defect(field: &Field, points: &[HPoint]) -> f64 {
    points
        .iter()
        .map(|&p| field.eval(p).norm())
        .fold(0.0, f64::max)
}

pub use rumin::primitive_of_closed_form10;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::expr;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pts(seed: u64, n: usize) -> Vec<HPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sampling::random_points_box(&mut rng, n, 1.5)
    }

    fn pi_dw2() -> QuadDiff {
        QuadDiff::new(Field::poly(&[(0, 2, 0, c(-4.0, 0.0))]), "pi_dw2")
    }

    #[test]
    fn operators_annihilate_pi_dw2() {
        let q = pi_dw2();
        let points = pts(1, 100);
        assert!(max_defect(&d2prime(&q), &points) < 1e-12);
        assert!(max_defect(&d2second(&q), &points) < 1e-12);
    }

    #[test]
    fn operators_annihilate_unit() {
        let q = QuadDiff::new(Field::constant(c(1.0, 0.0)), "dz2");
        let points = pts(2, 50);
        assert!(max_defect(&d2prime(&q), &points) == 0.0);
        assert!(max_defect(&d2second(&q), &points) == 0.0);
        assert!(max_defect(&b2(&q), &points) == 0.0);
    }

    #[test]
    fn b2_separates_pi_dw2() {
        // B2(-4 zbar^2) = 64 z^2 zbar: Zbar(16 |z|^4) = 32 z^2 zbar plus
        // (-4 z^2)(-8 zbar) = 32 z^2 zbar
        let field = b2(&pi_dw2());
        for p in pts(3, 100) {
            let expected = 64.0 * p.z * p.z * p.z.conj();
            assert!((field.eval(p) - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn k_form_operators_match_quadratic_case() {
        let q = pi_dw2();
        let a = q.as_kform();
        let generic = QuadDiff::new(
            Field::poly(&[(2, 1, 0, c(1.0, 0.5)), (0, 0, 1, c(0.0, 2.0))]),
            "generic",
        );
        let gk = generic.as_kform();
        for p in pts(4, 50) {
            assert!((d2prime(&q).eval(p) - dkprime(&a).eval(p)).norm() < 1e-12);
            assert!((d2second(&q).eval(p) - dksecond(&a).eval(p)).norm() < 1e-12);
            assert!((b2(&q).eval(p) - bk(&a).eval(p)).norm() < 1e-12);
            assert!((d2prime(&generic).eval(p) - dkprime(&gk).eval(p)).norm() < 1e-9);
            assert!((d2second(&generic).eval(p) - dksecond(&gk).eval(p)).norm() < 1e-9);
        }
    }

    #[test]
    fn powers_of_cr_derivatives_are_annihilated() {
        // alpha = (Z z)^3 == 1 and alpha = (Z(z^2))^3 = 8 z^3
        let unit = KForm::new(3, Field::constant(c(1.0, 0.0)), "1");
        let points = pts(5, 60);
        assert!(max_defect(&dkprime(&unit), &points) == 0.0);
        assert!(max_defect(&dksecond(&unit), &points) == 0.0);
        assert!(max_defect(&bk(&unit), &points) == 0.0);
        let cubed = KForm::new(3, Field::poly(&[(3, 0, 0, c(8.0, 0.0))]), "8z^3");
        assert!(max_defect(&dksecond(&cubed), &points) < 1e-9);
        assert!(max_defect(&dkprime(&cubed), &points) < 1e-9);
    }

    #[test]
    fn pullback_by_identity_and_dilation() {
        let q = QuadDiff::new(Field::constant(c(1.0, 0.0)), "dz2");
        let probe = pts(6, 20);
        let id = catalog::identity_map();
        let same = pullback(&q, &id, 1e-10, &probe).unwrap();
        for &p in &probe {
            assert!((same.eval(p) - q.eval(p)).norm() < 1e-14);
        }
        let r = 1.7;
        let dil = catalog::dilation_map(r);
        let scaled = pullback(&q, &dil, 1e-10, &probe).unwrap();
        for &p in &probe {
            assert!((scaled.eval(p) - c(r * r, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn pullback_of_dw2_by_projection_squares_the_derivative() {
        // (Z Pi)^2 = -4 zbar^2 for the CR projection Pi = t + i|z|^2
        let proj = Field::new(
            expr::add(
                expr::var_t(),
                expr::mul(expr::cst(I), expr::abs_sqr(expr::var_z())),
            ),
            "Pi",
        );
        let zp = proj.z_field();
        let q = QuadDiff::new(&zp * &zp, "Pi* dw2");
        for p in pts(7, 30) {
            let expected = c(-4.0, 0.0) * p.z.conj() * p.z.conj();
            assert!((q.eval(p) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn pullback_rejects_non_contact_maps() {
        // (z, 2t) scales the vertical without the matching horizontal
        // dilation, so it is not contact
        let not_contact = ContactMap::new(
            Field::coord_z(),
            crate::field::scale(c(2.0, 0.0), &Field::coord_t()),
            "vertical stretch",
        );
        let q = QuadDiff::new(Field::constant(c(1.0, 0.0)), "dz2");
        let probe = pts(12, 10);
        assert!(matches!(
            pullback(&q, &not_contact, 1e-8, &probe),
            Err(Error::NotContact { .. })
        ));
    }

    #[test]
    fn naturality_under_similarities() {
        let q = pi_dw2();
        let points = pts(8, 100);
        let translation = catalog::left_translation(HPoint::from_parts(0.4, -0.3, 0.8));
        let rotation = catalog::vertical_rotation(0.7);
        let dilation = catalog::dilation_map(1.3);
        for g in [&translation, &rotation, &dilation] {
            let defect = naturality_defect(&q, g, &points, 1e-8).unwrap();
            assert!(defect < 1e-8, "{}: {defect}", g.name);
        }
        let id = catalog::identity_map();
        assert!(naturality_defect(&q, &id, &points, 1e-8).unwrap() < 1e-13);
    }

    #[test]
    fn natural_chart_of_unit_differential() {
        // q = dz^2 at base 0 gives (f, h) = (z, t) up to sign
        let q = QuadDiff::new(Field::constant(c(1.0, 0.0)), "dz2");
        let nbhd = pts(9, 30);
        let chart = natural_chart(&q, HPoint::origin(), &nbhd, 1.0, 1e-9).unwrap();
        for &p in &nbhd[..6] {
            let (f, h) = chart.eval(p).unwrap();
            assert!((f - p.z).norm() < 1e-8, "f defect at {p}");
            assert!((h - p.t).abs() < 1e-8, "h defect at {p}");
        }
        let neg = natural_chart(&q, HPoint::origin(), &nbhd, -1.0, 1e-9).unwrap();
        let p = nbhd[0];
        let (f, h) = neg.eval(p).unwrap();
        assert!((f + p.z).norm() < 1e-8);
        assert!((h - p.t).abs() < 1e-8);
    }

    #[test]
    fn natural_chart_rejections() {
        let nbhd = pts(10, 10);
        let q = QuadDiff::new(Field::poly(&[(2, 0, 0, c(4.0, 0.0))]), "4z^2");
        assert!(matches!(
            natural_chart(&q, HPoint::origin(), &nbhd, 1.0, 1e-9),
            Err(Error::ZeroAtBase)
        ));
        let qb = pi_dw2();
        assert!(matches!(
            natural_chart(&qb, HPoint::from_parts(1.0, 0.0, 0.0), &nbhd, 1.0, 1e-9),
            Err(Error::OperatorsNonzero { operator: "B2", .. })
        ));
        let qd = QuadDiff::new(Field::coord_zbar(), "zbar");
        assert!(matches!(
            natural_chart(&qd, HPoint::from_parts(1.0, 0.0, 0.0), &nbhd, 1.0, 1e-9),
            Err(Error::OperatorsNonzero { .. })
        ));
    }

    #[test]
    fn natural_chart_path_independence() {
        let q = QuadDiff::new(Field::constant(c(1.0, 0.0)), "dz2");
        let nbhd = pts(11, 20);
        let chart = natural_chart(&q, HPoint::origin(), &nbhd, 1.0, 1e-9).unwrap();
        let target = HPoint::from_parts(0.6, -0.4, 0.9);
        let (f1, h1) = chart
            .eval_via(target, &[HPoint::from_parts(0.2, 0.5, 0.0)])
            .unwrap();
        let (f2, h2) = chart
            .eval_via(target, &[HPoint::from_parts(-0.4, -0.1, 0.7)])
            .unwrap();
        assert!((f1 - f2).norm() < 1e-8);
        assert!((h1 - h2).abs() < 1e-8);
    }
}

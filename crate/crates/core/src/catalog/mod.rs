//! The catalog: explicit domains, maps, quadratic differentials, densities
//! and closed-form trajectory families, each wired to automated verification.
//!
//! Everything is stored in Heisenberg coordinates. The maps defined in
//! logarithmic coordinates (the radial stretch and its shear family) are
//! conjugated through to/from_log_coords symbolically, so their jets are
//! exact; `verify` cross-checks the closed forms against the pointwise
//! conjugation.

pub mod verify;

use crate::curves::{LegendrianCurve, ParamFn};
use crate::error::{Error, Result};
use crate::expr::{self, ExprRef};
use crate::field::Field;
use crate::heis::HPoint;
use crate::moduli::CurveFamily;
use crate::qc::{ContactMap, Density};
use crate::quad_diff::QuadDiff;
use crate::sampling::Domain;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

pub use verify::{verify, VerifyOpts};

const I: C64 = C64::new(0.0, 1.0);

/// Example parameters, deserialized from the CLI parameter file
/// `{"example": ..., "params": {"a": ..., "a_p": ..., ...}}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_p: f64,
    pub b_p: f64,
    pub c_p: f64,
    pub k: f64,
    pub d: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self { a: 2.0, b: 1.0, c: PI / 2.0, a_p: 1.0, b_p: 2.0, c_p: PI / 2.0, k: 0.5, d: 1.0 }
    }
}

impl Params {
    /// Defaults satisfying each example's parameter constraint.
    pub fn default_for(example: &str) -> Params {
        let mut p = Params::default();
        match example {
            // c'/c = a'b'/(ab)
            "ex1" => p.c_p = p.c * p.a_p * p.b_p / (p.a * p.b),
            // bc/a = b'c'/a'
            "ex2" => p.c_p = p.a_p * p.b * p.c / (p.a * p.b_p),
            // ab/(b+1) = a'b'/(b'+1), a(b'+1)/(a'(b+1)) > 1
            "d_domain" => {
                p.a = 3.0;
                p.b = 1.0;
                p.a_p = 2.0;
                p.b_p = 3.0;
            }
            // annulus A_a with a > 1
            "ex3" | "annulus" | "radial_stretch" | "gD" => p.a = 2.0,
            _ => {}
        }
        p
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("a".into(), self.a);
        m.insert("b".into(), self.b);
        m.insert("c".into(), self.c);
        m.insert("a_p".into(), self.a_p);
        m.insert("b_p".into(), self.b_p);
        m.insert("c_p".into(), self.c_p);
        m.insert("k".into(), self.k);
        m.insert("d".into(), self.d);
        m
    }
}

/// A catalog map with its parameters, domains and the dilation factors the
/// closed forms predict.
#[derive(Debug, Clone)]
pub struct NamedMap {
    pub id: String,
    pub map: ContactMap,
    pub params: BTreeMap<String, f64>,
    pub source: Domain,
    pub target: Domain,
    /// q-length factor on horizontal trajectories, where stated.
    pub horizontal_factor: Option<f64>,
    /// Arclength factor on vertical trajectories, where stated.
    pub vertical_factor: Option<f64>,
}

/// Any object loadable by identifier.
pub enum Loaded {
    Domain(Domain),
    Map(Box<NamedMap>),
    Differential(QuadDiff),
    Family(CurveFamily),
    Density(Density),
}

// ---------------------------------------------------------------------------
// similarity maps
// ---------------------------------------------------------------------------

pub use crate::qc::identity_map;

/// Left translation p -> g p.
pub fn left_translation(g: HPoint) -> ContactMap {
    let f1 = expr::add(expr::cst(g.z), expr::var_z());
    // t + t_g + 2 Im(z_g conj z)
    let f2 = expr::add(
        expr::add(expr::var_t(), expr::cst_re(g.t)),
        expr::mul(
            expr::cst_re(2.0),
            expr::im_part(expr::mul(expr::cst(g.z), expr::var_zbar())),
        ),
    );
    ContactMap::new(
        Field::new(f1, "g.z + z"),
        Field::new(f2, "g.t + t + 2Im(g.z zbar)"),
        format!("translation by {g}"),
    )
    .with_inverse(raw_translation(crate::heis::group_inv(g)))
}

fn raw_translation(g: HPoint) -> ContactMap {
    let f1 = expr::add(expr::cst(g.z), expr::var_z());
    let f2 = expr::add(
        expr::add(expr::var_t(), expr::cst_re(g.t)),
        expr::mul(
            expr::cst_re(2.0),
            expr::im_part(expr::mul(expr::cst(g.z), expr::var_zbar())),
        ),
    );
    ContactMap::new(Field::new(f1, "f1"), Field::new(f2, "f2"), "translation")
}

/// Vertical rotation (z, t) -> (e^{i theta} z, t).
pub fn vertical_rotation(theta: f64) -> ContactMap {
    let phase = C64::from_polar(1.0, theta);
    ContactMap::new(
        Field::new(expr::mul(expr::cst(phase), expr::var_z()), "e^{i th} z"),
        Field::coord_t(),
        format!("rotation({theta})"),
    )
}

/// Group dilation (z, t) -> (r z, r^2 t).
pub fn dilation_map(r: f64) -> ContactMap {
    ContactMap::new(
        Field::new(expr::mul(expr::cst_re(r), expr::var_z()), "r z"),
        Field::new(expr::mul(expr::cst_re(r * r), expr::var_t()), "r^2 t"),
        format!("dilation({r})"),
    )
}

// ---------------------------------------------------------------------------
// quadratic differentials
// ---------------------------------------------------------------------------

/// [dz^2]_w, coefficient 1.
pub fn qd_dz2() -> QuadDiff {
    QuadDiff::new(Field::constant(C64::new(1.0, 0.0)).with_name("1"), "dz2")
}

/// The pull-back of dw^2 by the CR projection t + i|z|^2: [-4 zbar^2 dz^2]_w.
pub fn qd_pi_dw2() -> QuadDiff {
    QuadDiff::new(
        Field::poly(&[(0, 2, 0, C64::new(-4.0, 0.0))])
            .with_name("-4 zbar^2")
            .with_domain(Domain::axis_punctured()),
        "pi_dw2",
    )
}

/// The pull-back of dw^2/w^2: [-4 zbar^2 / (t + i|z|^2)^2 dz^2]_w.
pub fn qd_pi_dw2_over_w2() -> QuadDiff {
    let w = expr::add(
        expr::var_t(),
        expr::mul(expr::cst(I), expr::abs_sqr(expr::var_z())),
    );
    let coeff = expr::div(
        expr::mul(expr::cst_re(-4.0), expr::powi(expr::var_zbar(), 2)),
        expr::powi(w, 2),
    );
    QuadDiff::new(
        Field::new(coeff, "-4 zbar^2 / w^2").with_domain(Domain::axis_punctured()),
        "pi_dw2_over_w2",
    )
}

// ---------------------------------------------------------------------------
// expression helpers
// ---------------------------------------------------------------------------

/// |z|^2 = z zbar.
fn r2() -> ExprRef {
    expr::abs_sqr(expr::var_z())
}

/// |z|^4 + t^2.
fn n4() -> ExprRef {
    expr::add(expr::powi(r2(), 2), expr::powi(expr::var_t(), 2))
}

/// arg z as a smooth expression on 0 < arg z < 2 pi (cut on the positive
/// real axis): pi + 2 atan(-y / (|z| - x)).
fn arg_branch_0_2pi() -> ExprRef {
    let x = expr::re_part(expr::var_z());
    let y = expr::im_part(expr::var_z());
    let r = expr::sqrt(r2());
    expr::add(
        expr::cst_re(PI),
        expr::mul(
            expr::cst_re(2.0),
            expr::atan(expr::div(expr::neg(y), expr::sub(r, x))),
        ),
    )
}

// ---------------------------------------------------------------------------
// Example 1: affine stretch of the lifted rectangle
// ---------------------------------------------------------------------------

/// The affine map (x + iy, t) -> ((a'/a) x + i (b'/b) y, (a'b'/ab) t)
/// between lifted rectangles; requires c'/c = a'b'/(ab).
pub fn ex1_f0(a: f64, b: f64, c: f64, ap: f64, bp: f64, cp: f64) -> Result<NamedMap> {
    let lhs = cp / c;
    let rhs = ap * bp / (a * b);
    if ((lhs - rhs) / rhs).abs() > 1e-12 {
        return Err(Error::ParameterConstraintViolated(format!(
            "c'/c = a'b'/(ab) required, got {lhs} vs {rhs}"
        )));
    }
    let source = Domain::lifted_box(a, b, c);
    let target = Domain::lifted_box(ap, bp, cp);
    let map = affine_stretch(ap / a, bp / b)
        .with_domain(source.clone())
        .with_inverse(affine_stretch(a / ap, b / bp).with_domain(target.clone()));
    let mut params = BTreeMap::new();
    for (k, v) in [("a", a), ("b", b), ("c", c), ("a_p", ap), ("b_p", bp), ("c_p", cp)] {
        params.insert(k.into(), v);
    }
    Ok(NamedMap {
        id: "ex1_f0".into(),
        map,
        params,
        source,
        target,
        horizontal_factor: Some(ap / a),
        vertical_factor: Some(bp / b),
    })
}

fn affine_stretch(big_a: f64, big_b: f64) -> ContactMap {
    // f1 = ((A+B)/2) z + ((A-B)/2) zbar
    let f1 = expr::add(
        expr::mul(expr::cst_re(0.5 * (big_a + big_b)), expr::var_z()),
        expr::mul(expr::cst_re(0.5 * (big_a - big_b)), expr::var_zbar()),
    );
    let f2 = expr::mul(expr::cst_re(big_a * big_b), expr::var_t());
    ContactMap::new(
        Field::new(f1, "A x + i B y"),
        Field::new(f2, "AB t"),
        format!("ex1_f0(A={big_a}, B={big_b})"),
    )
}

// ---------------------------------------------------------------------------
// Example 2: the sector domain C, its extremal density and map
// ---------------------------------------------------------------------------

/// The map (z, t) -> (sqrt(b'/b) |z| e^{i (a'b/ab') arg z}, (a'/a) t) between
/// sector domains; requires bc/a = b'c'/a'.
pub fn ex2_f0(a: f64, b: f64, c: f64, ap: f64, bp: f64, cp: f64) -> Result<NamedMap> {
    let lhs = b * c / a;
    let rhs = bp * cp / ap;
    if ((lhs - rhs) / rhs).abs() > 1e-12 {
        return Err(Error::ParameterConstraintViolated(format!(
            "bc/a = b'c'/a' required, got {lhs} vs {rhs}"
        )));
    }
    let source = Domain::c_box(a, b, c);
    let target = Domain::c_box(ap, bp, cp);
    let map = sector_stretch(a, b, ap, bp)
        .with_domain(source.clone())
        .with_inverse(sector_stretch(ap, bp, a, b).with_domain(target.clone()));
    let mut params = BTreeMap::new();
    for (k, v) in [("a", a), ("b", b), ("c", c), ("a_p", ap), ("b_p", bp), ("c_p", cp)] {
        params.insert(k.into(), v);
    }
    Ok(NamedMap {
        id: "ex2_f0".into(),
        map,
        params,
        source,
        target,
        horizontal_factor: Some(ap / a),
        vertical_factor: Some((bp / b).sqrt()),
    })
}

fn sector_stretch(a: f64, b: f64, ap: f64, bp: f64) -> ContactMap {
    let kappa = ap * b / (a * bp);
    let scale = (bp / b).sqrt();
    let r = expr::sqrt(r2());
    let theta = arg_branch_0_2pi();
    let f1 = expr::mul(
        expr::mul(expr::cst_re(scale), r),
        expr::exp(expr::mul(expr::cst(I * kappa), theta)),
    );
    let f2 = expr::mul(expr::cst_re(ap / a), expr::var_t());
    ContactMap::new(
        Field::new(f1, "sqrt(b'/b)|z| e^{i kappa arg z}"),
        Field::new(f2, "(a'/a) t"),
        format!("ex2_f0(kappa={kappa})"),
    )
}

/// Extremal density of the radii family: 2 / (3 b^{1/3} |z|^{1/3}).
pub fn ex2_rho0(a: f64, b: f64, c: f64) -> Density {
    let coeff = 2.0 / (3.0 * b.powf(1.0 / 3.0));
    let rho = expr::div(expr::cst_re(coeff), expr::powf(r2(), 1.0 / 6.0));
    Density::new(
        Field::new(rho, "2/(3 b^{1/3} |z|^{1/3})").with_domain(Domain::c_box(a, b, c)),
        "rho0",
    )
}

/// Radii family of the sector domain: (u^{3/2} e^{i theta}, t) with the
/// radial parameter u = r^{2/3}, which makes the rho0 line integrand constant.
pub fn ex2_radii_family(a: f64, b: f64, c: f64) -> CurveFamily {
    let u_max = b.powf(1.0 / 3.0);
    CurveFamily::new(
        "ex2_radii",
        vec![(0.0, c), (0.0, a)],
        Domain::c_box(a, b, c),
        Arc::new(move |params: &[f64]| {
            let dir = C64::from_polar(1.0, params[0]);
            let t = params[1];
            let gen: ParamFn = Arc::new(move |u| {
                (u.powf(1.5) * dir, t, 1.5 * u.sqrt() * dir, 0.0)
            });
            LegendrianCurve::from_param(gen, 1e-12, u_max, 96)
        }),
    )
}

/// Horizontal trajectories of [-4 zbar^2 dz^2]_w filling a cylinder:
/// gamma_z(s) = (z e^{-is/2|z|^2}, s), s in (0, a), indexed by (r, phi).
pub fn cyl_horizontal_family(a: f64, b: f64) -> CurveFamily {
    CurveFamily::new(
        "cyl_horizontal",
        vec![(0.05 * b.sqrt(), b.sqrt()), (0.0, 2.0 * PI)],
        Domain::cylinder(a, b),
        Arc::new(move |params: &[f64]| {
            let z0 = C64::from_polar(params[0], params[1]);
            let w = 1.0 / (2.0 * z0.norm_sqr());
            let gen: ParamFn = Arc::new(move |s| {
                let z = z0 * C64::from_polar(1.0, -w * s);
                (z, s, z * C64::new(0.0, -w), 1.0)
            });
            LegendrianCurve::from_param(gen, 0.0, a, 96)
        }),
    )
}

/// Pull-back density sqrt(|q_Omega|)/a = 2|z|/a of the lifted quadrilateral.
pub fn pullback_density(a: f64, b: f64) -> Density {
    let rho = expr::mul(expr::cst_re(2.0 / a), expr::sqrt(r2()));
    Density::new(
        Field::new(rho, "2|z|/a").with_domain(Domain::cylinder(a, b)),
        "pullback",
    )
}

// ---------------------------------------------------------------------------
// cylinders C_{a,b} and shells D_{a,b}
// ---------------------------------------------------------------------------

/// The mean-distortion minimizer between cylinders C_{a,b} -> C_{a',b'};
/// requires ab'/(a'b) > 1. Its inverse is the parameter-swapped map.
pub fn cyl_f0(a: f64, b: f64, ap: f64, bp: f64) -> Result<NamedMap> {
    if a * bp / (ap * b) <= 1.0 {
        return Err(Error::ParameterConstraintViolated(format!(
            "ab'/(a'b) > 1 required, got {}",
            a * bp / (ap * b)
        )));
    }
    let source = Domain::cylinder(a, b);
    let target = Domain::cylinder(ap, bp);
    let map = cyl_f0_raw(a, b, ap, bp)
        .with_domain(source.clone())
        .with_inverse(cyl_f0_raw(ap, bp, a, b).with_domain(target.clone()));
    let mut params = BTreeMap::new();
    for (k, v) in [("a", a), ("b", b), ("a_p", ap), ("b_p", bp)] {
        params.insert(k.into(), v);
    }
    Ok(NamedMap {
        id: "cyl_f0".into(),
        map,
        params,
        source,
        target,
        horizontal_factor: Some(ap / a),
        vertical_factor: None,
    })
}

fn cyl_f0_raw(a: f64, b: f64, ap: f64, bp: f64) -> ContactMap {
    // f1 = sqrt(b') z e^{(it/2b)(1 - a'b/(ab'))} / sqrt((1 - ab'/(a'b))|z|^2 + ab'/a')
    let phase_rate = (1.0 - ap * b / (a * bp)) / (2.0 * b);
    let radicand = expr::add(
        expr::mul(expr::cst_re(1.0 - a * bp / (ap * b)), r2()),
        expr::cst_re(a * bp / ap),
    );
    let f1 = expr::div(
        expr::mul(
            expr::mul(expr::cst_re(bp.sqrt()), expr::var_z()),
            expr::exp(expr::mul(expr::cst(I * phase_rate), expr::var_t())),
        ),
        expr::sqrt(radicand),
    );
    let f2 = expr::mul(expr::cst_re(ap / a), expr::var_t());
    ContactMap::new(
        Field::new(f1, "cylinder minimizer"),
        Field::new(f2, "(a'/a) t"),
        format!("cyl_f0({a},{b}->{ap},{bp})"),
    )
}

/// Radicand of the cylinder map on its source domain; positivity is checked
/// numerically by `verify` because the closed form gives no argument for it.
pub fn cyl_f0_radicand(a: f64, b: f64, ap: f64, bp: f64, p: HPoint) -> f64 {
    (1.0 - a * bp / (ap * b)) * p.z.norm_sqr() + a * bp / ap
}

/// Existence predicate for a dilating map between shells D_{a,b}, D_{a',b'}:
/// the rectangles (0,a)x(1,b+1) and (0,a')x(1,b'+1) have the same hyperbolic
/// area, ab/(b+1) = a'b'/(b'+1).
pub fn d_domain_map_exists(a: f64, b: f64, ap: f64, bp: f64) -> bool {
    let lhs = a * b / (b + 1.0);
    let rhs = ap * bp / (bp + 1.0);
    ((lhs - rhs) / rhs).abs() < 1e-12
}

/// The shell map: restriction of the C_{a,b+1} -> C_{a',b'+1} minimizer to
/// D_{a,b}; only exists under `d_domain_map_exists`.
pub fn d_domain_map(a: f64, b: f64, ap: f64, bp: f64) -> Result<NamedMap> {
    if !d_domain_map_exists(a, b, ap, bp) {
        return Err(Error::ParameterConstraintViolated(
            "ab/(b+1) = a'b'/(b'+1) required: no dilating map exists".into(),
        ));
    }
    if a * (bp + 1.0) / (ap * (b + 1.0)) <= 1.0 {
        return Err(Error::ParameterConstraintViolated(format!(
            "a(b'+1)/(a'(b+1)) > 1 required, got {}",
            a * (bp + 1.0) / (ap * (b + 1.0))
        )));
    }
    let source = Domain::d_shell(a, b);
    let target = Domain::d_shell(ap, bp);
    let map = cyl_f0_raw(a, b + 1.0, ap, bp + 1.0)
        .with_domain(source.clone())
        .with_inverse(cyl_f0_raw(ap, bp + 1.0, a, b + 1.0).with_domain(target.clone()));
    let mut params = BTreeMap::new();
    for (k, v) in [("a", a), ("b", b), ("a_p", ap), ("b_p", bp)] {
        params.insert(k.into(), v);
    }
    Ok(NamedMap {
        id: "d_domain".into(),
        map,
        params,
        source,
        target,
        horizontal_factor: Some(ap / a),
        vertical_factor: None,
    })
}

// ---------------------------------------------------------------------------
// Example 3: spherical annuli, radial stretch and the shear family
// ---------------------------------------------------------------------------

/// Radial stretch between spherical annuli A_a -> A_{a^k}, defined in
/// logarithmic coordinates as (xi, psi, eta) -> (k xi, atan(tan(psi)/k), eta)
/// and conjugated here to closed Heisenberg-coordinate expressions.
pub fn radial_stretch(a: f64, k: f64) -> Result<NamedMap> {
    if a <= 1.0 || k <= 0.0 {
        return Err(Error::ParameterConstraintViolated(format!(
            "radial stretch needs a > 1 and k > 0, got a={a}, k={k}"
        )));
    }
    let source = Domain::annulus(a);
    let target = Domain::annulus(a.powf(k));
    let map = log_shear_raw(k, 0.0)
        .with_domain(source.clone())
        .with_inverse(log_shear_raw(1.0 / k, 0.0).with_domain(target.clone()));
    let mut params = BTreeMap::new();
    params.insert("a".into(), a);
    params.insert("k".into(), k);
    Ok(NamedMap {
        id: "radial_stretch".into(),
        map,
        params,
        source,
        target,
        horizontal_factor: Some(k),
        vertical_factor: None,
    })
}

/// The shear family (xi, psi, eta) -> (k xi, atan(tan(psi)/k + D), eta - kD xi/3);
/// D = 0 recovers the radial stretch. Inverse: (1/k, -kD).
pub fn g_d_map(a: f64, k: f64, big_d: f64) -> Result<NamedMap> {
    if a <= 1.0 || k <= 0.0 {
        return Err(Error::ParameterConstraintViolated(format!(
            "gD needs a > 1 and k > 0, got a={a}, k={k}"
        )));
    }
    let source = Domain::annulus(a);
    let target = Domain::annulus(a.powf(k));
    let map = log_shear_raw(k, big_d)
        .with_domain(source.clone())
        .with_inverse(log_shear_raw(1.0 / k, -k * big_d).with_domain(target.clone()));
    let mut params = BTreeMap::new();
    params.insert("a".into(), a);
    params.insert("k".into(), k);
    params.insert("d".into(), big_d);
    Ok(NamedMap {
        id: "gD".into(),
        map,
        params,
        source,
        target,
        horizontal_factor: Some(k),
        vertical_factor: None,
    })
}

/// Heisenberg-coordinate form of (xi, psi, eta) -> (k xi, atan(tan psi / k + D), eta - kD xi/3).
///
/// With w_D = k|z|^2 + i(Dk|z|^2 - t) and N_D = |w_D|:
///   t'  = (t - Dk|z|^2) (|z|^4 + t^2)^{k/2} / N_D
///   z'  = sqrt(k|z|^2 / N_D) (|z|^4 + t^2)^{k/4}
///         e^{i psi'/2} e^{-i psi/2} e^{i kD xi/2} z/|z|
/// where e^{i psi} = (|z|^2 - it)/sqrt(|z|^4+t^2), e^{i psi'} = w_D / N_D,
/// half angles via e^{i psi/2} = (1 + e^{i psi})/|1 + e^{i psi}| (valid since
/// psi is interior to (-pi, pi)), and e^{i kD xi/2} from xi = ln(|z|^4+t^2)/2.
fn log_shear_raw(k: f64, big_d: f64) -> ContactMap {
    let half = |u: ExprRef| -> ExprRef {
        let one_plus = expr::add(expr::cst_re(1.0), u);
        expr::div(one_plus.clone(), expr::sqrt(expr::abs_sqr(one_plus)))
    };
    let n4 = n4();
    let n2 = expr::sqrt(n4.clone());
    // e^{i psi} = (|z|^2 - i t)/N^2
    let e_psi = expr::div(
        expr::sub(r2(), expr::mul(expr::cst(I), expr::var_t())),
        n2,
    );
    // w_D = k|z|^2 + i (D k |z|^2 - t), so that e^{i psi'} = w_D / |w_D|
    let dk_r2_minus_t = expr::sub(
        expr::mul(expr::cst_re(big_d * k), r2()),
        expr::var_t(),
    );
    let w_d = expr::add(
        expr::mul(expr::cst_re(k), r2()),
        expr::mul(expr::cst(I), dk_r2_minus_t.clone()),
    );
    let n_d = expr::sqrt(expr::abs_sqr(w_d.clone()));
    let e_psi_p = expr::div(w_d, n_d.clone());

    // t' = (t - Dk|z|^2) (|z|^4+t^2)^{k/2} / N_D
    let f2 = expr::div(
        expr::mul(expr::neg(dk_r2_minus_t), expr::powf(n4.clone(), k / 2.0)),
        n_d.clone(),
    );

    // modulus: sqrt(k |z|^2 / N_D) (|z|^4+t^2)^{k/4}
    let modulus = expr::mul(
        expr::sqrt(expr::div(expr::mul(expr::cst_re(k), r2()), n_d)),
        expr::powf(n4.clone(), k / 4.0),
    );
    // phase: e^{i psi'/2} conj(e^{i psi/2}) e^{i kD xi /2} z/|z|
    let mut phase = expr::mul(half(e_psi_p), expr::conj(half(e_psi)));
    if big_d != 0.0 {
        // xi = ln(|z|^4 + t^2)/2
        let rot = expr::exp(expr::mul(expr::cst(I * (k * big_d / 4.0)), expr::ln(n4)));
        phase = expr::mul(phase, rot);
    }
    let dir = expr::div(expr::var_z(), expr::sqrt(r2()));
    let f1 = expr::mul(modulus, expr::mul(phase, dir));

    ContactMap::new(
        Field::new(f1, "log-shear z'"),
        Field::new(f2, "log-shear t'"),
        format!("log_shear(k={k}, D={big_d})"),
    )
}

/// Extremal density of the horizontal-trajectory family in A_a:
/// sqrt(|q|)/(2 ln a) with |q| = 4|z|^2/(|z|^4 + t^2).
pub fn ex3_rho(a: f64) -> Density {
    let rho = expr::div(
        expr::sqrt(r2()),
        expr::mul(expr::cst_re(a.ln()), expr::sqrt(n4())),
    );
    Density::new(
        Field::new(rho, "|z| / (ln a sqrt(|z|^4+t^2))").with_domain(Domain::annulus(a)),
        "ex3_rho",
    )
}

/// Horizontal radial curves of A_a: log coordinates (s, psi, eta - tan(psi) s / 3),
/// s in (0, 2 ln a); unit q-speed for the annular differential.
pub fn ex3_horizontal_family(a: f64) -> CurveFamily {
    let ximax = 2.0 * a.ln();
    CurveFamily::new(
        "ex3_horizontal",
        vec![(-PI / 2.0 + 1e-3, PI / 2.0 - 1e-3), (0.0, 4.0 * PI / 3.0)],
        Domain::annulus(a),
        Arc::new(move |params: &[f64]| {
            let (psi, eta0) = (params[0], params[1]);
            let gen = horizontal_log_curve(psi, eta0);
            LegendrianCurve::from_param(gen, 0.0, ximax, 96)
        }),
    )
}

/// Parametric horizontal trajectory through log coordinates (0, psi, eta0):
/// velocity dz/ds = z (1 + i tan psi)/2, dt/ds = t.
pub fn horizontal_log_curve(psi: f64, eta0: f64) -> ParamFn {
    Arc::new(move |s| {
        let eta = eta0 - psi.tan() / 3.0 * s;
        let p = crate::heis::from_log_coords(crate::heis::LogCoords::new(s, psi, eta));
        let vel_z = p.z * C64::new(0.5, 0.5 * psi.tan());
        (p.z, p.t, vel_z, p.t)
    })
}

/// Vertical spherical arcs of A_a: log coordinates (xi, s, eta), the psi
/// coordinate as parameter, clipped away from the poles.
pub fn ex3_vertical_family(a: f64) -> CurveFamily {
    let ximax = 2.0 * a.ln();
    CurveFamily::new(
        "ex3_vertical",
        vec![(1e-3, ximax - 1e-3), (0.0, 4.0 * PI / 3.0)],
        Domain::annulus(a),
        Arc::new(move |params: &[f64]| {
            let (xi, eta) = (params[0], params[1]);
            let gen = vertical_log_curve(xi, eta);
            LegendrianCurve::from_param(gen, -PI / 2.0 + 1e-3, PI / 2.0 - 1e-3, 96)
        }),
    )
}

/// Parametric vertical trajectory (xi, s, eta) in log coordinates:
/// dz/ds = z(-tan s + i)/2, dt/ds = -cos(s) e^xi.
pub fn vertical_log_curve(xi: f64, eta: f64) -> ParamFn {
    Arc::new(move |s| {
        let p = crate::heis::from_log_coords(crate::heis::LogCoords::new(xi, s, eta));
        let vel_z = p.z * C64::new(-0.5 * s.tan(), 0.5);
        let vel_t = -s.cos() * xi.exp();
        (p.z, p.t, vel_z, vel_t)
    })
}

/// Example-1 horizontal lift (s + iy, t0 + 2 s y) as a parametric curve.
pub fn ex1_horizontal_curve(y: f64, t0: f64) -> ParamFn {
    Arc::new(move |s| (C64::new(s, y), t0 + 2.0 * s * y, C64::new(1.0, 0.0), 2.0 * y))
}

/// Example-1 vertical lift (x + is, t0 - 2 x s).
pub fn ex1_vertical_curve(x: f64, t0: f64) -> ParamFn {
    Arc::new(move |s| (C64::new(x, s), t0 - 2.0 * x * s, C64::new(0.0, 1.0), -2.0 * x))
}

/// Cylindrical radius (s z0, t0), |z0| = 1.
pub fn radius_curve(dir: f64, t0: f64) -> ParamFn {
    let z0 = C64::from_polar(1.0, dir);
    Arc::new(move |s| (s * z0, t0, z0, 0.0))
}

/// Horizontal spiral (z0 e^{-is/2|z0|^2}, t0 + s) through (z0, t0).
pub fn spiral_curve(z0: C64, t0: f64) -> ParamFn {
    let w = 1.0 / (2.0 * z0.norm_sqr());
    Arc::new(move |s| {
        let z = z0 * C64::from_polar(1.0, -w * s);
        (z, t0 + s, z * C64::new(0.0, -w), 1.0)
    })
}

/// Spherical-arc vertical trajectory of Example 3 through its closed form
/// (sqrt(e^x sin s) alpha e^{is/2}, e^x cos s).
pub fn spherical_arc_curve(x: f64, alpha: f64) -> ParamFn {
    let dir = C64::from_polar(1.0, alpha);
    Arc::new(move |s: f64| {
        let r = ((x).exp() * s.sin()).sqrt();
        let z = r * dir * C64::from_polar(1.0, s / 2.0);
        let t = x.exp() * s.cos();
        let dlog = C64::new(s.cos() / (2.0 * s.sin()), 0.5);
        (z, t, z * dlog, -x.exp() * s.sin())
    })
}

/// Radial curve of Example 3 through its closed form
/// (sqrt(e^s sin y) alpha e^{-(is/2) cot y}, e^s cos y).
pub fn radial_log_closed_form(y: f64, alpha: f64) -> ParamFn {
    let dir = C64::from_polar(1.0, alpha);
    Arc::new(move |s: f64| {
        let r = (s.exp() * y.sin()).sqrt();
        let z = r * dir * C64::from_polar(1.0, -s / 2.0 * y.tan().recip());
        let t = s.exp() * y.cos();
        let dlog = C64::new(0.5, -0.5 * y.tan().recip());
        (z, t, z * dlog, t)
    })
}

// ---------------------------------------------------------------------------
// loading by identifier
// ---------------------------------------------------------------------------

/// Construct a catalog object from its identifier and parameters.
pub fn load(id: &str, p: &Params) -> Result<Loaded> {
    match id {
        "ex1_domain" => Ok(Loaded::Domain(Domain::lifted_box(p.a, p.b, p.c))),
        "ex2_domain" => Ok(Loaded::Domain(Domain::c_box(p.a, p.b, p.c))),
        "cylinder" => Ok(Loaded::Domain(Domain::cylinder(p.a, p.b))),
        "d_shell" => Ok(Loaded::Domain(Domain::d_shell(p.a, p.b))),
        "annulus" => Ok(Loaded::Domain(Domain::annulus(p.a))),
        "ex1_f0" => Ok(Loaded::Map(Box::new(ex1_f0(p.a, p.b, p.c, p.a_p, p.b_p, p.c_p)?))),
        "ex2_f0" => Ok(Loaded::Map(Box::new(ex2_f0(p.a, p.b, p.c, p.a_p, p.b_p, p.c_p)?))),
        "cyl_f0" => Ok(Loaded::Map(Box::new(cyl_f0(p.a, p.b, p.a_p, p.b_p)?))),
        "d_domain" => Ok(Loaded::Map(Box::new(d_domain_map(p.a, p.b, p.a_p, p.b_p)?))),
        "radial_stretch" => Ok(Loaded::Map(Box::new(radial_stretch(p.a, p.k)?))),
        "gD" => Ok(Loaded::Map(Box::new(g_d_map(p.a, p.k, p.d)?))),
        "dz2" => Ok(Loaded::Differential(qd_dz2())),
        "pi_dw2" => Ok(Loaded::Differential(qd_pi_dw2())),
        "pi_dw2_over_w2" => Ok(Loaded::Differential(qd_pi_dw2_over_w2())),
        "ex2_radii" => Ok(Loaded::Family(ex2_radii_family(p.a, p.b, p.c))),
        "cyl_horizontal" => Ok(Loaded::Family(cyl_horizontal_family(p.a, p.b))),
        "ex3_horizontal" => Ok(Loaded::Family(ex3_horizontal_family(p.a))),
        "ex3_vertical" => Ok(Loaded::Family(ex3_vertical_family(p.a))),
        "rho0" => Ok(Loaded::Density(ex2_rho0(p.a, p.b, p.c))),
        "rho0_prime" => Ok(Loaded::Density(
            ex2_rho0(p.a_p, p.b_p, p.c_p).rho.with_name("rho0_prime").into_density("rho0_prime"),
        )),
        "pullback" => Ok(Loaded::Density(pullback_density(p.a, p.b))),
        "ex3_rho" => Ok(Loaded::Density(ex3_rho(p.a))),
        "ex3_rho_prime" => Ok(Loaded::Density(
            ex3_rho(p.a.powf(p.k)).rho.into_density("ex3_rho_prime"),
        )),
        other => Err(Error::UnknownIdentifier(other.to_string())),
    }
}

trait IntoDensity {
    fn into_density(self, name: &str) -> Density;
}

impl IntoDensity for Field {
    fn into_density(self, name: &str) -> Density {
        Density::new(self, name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{from_log_coords, to_log_coords, LogCoords};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ex1_constraint_enforced() {
        assert!(matches!(
            ex1_f0(2.0, 1.0, 1.0, 1.0, 2.0, 7.0),
            Err(Error::ParameterConstraintViolated(_))
        ));
        assert!(ex1_f0(2.0, 1.0, 1.0, 1.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn ex2_map_moduli_and_angles() {
        let p = Params::default_for("ex2");
        let f = ex2_f0(p.a, p.b, p.c, p.a_p, p.b_p, p.c_p).unwrap();
        let kappa = p.a_p * p.b / (p.a * p.b_p);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in f.source.sample(&mut rng, 50) {
            let img = f.map.apply(q);
            assert!(
                (img.z.norm() - (p.b_p / p.b).sqrt() * q.z.norm()).abs() < 1e-12
            );
            let th = crate::heis::to_cylindrical(q).theta;
            let th_img = crate::heis::to_cylindrical(img).theta;
            assert!((th_img - kappa * th).abs() < 1e-10);
            assert!(f.target.contains(img), "{q} -> {img}");
            // round trip through the inverse
            let back = f.map.inverse.as_ref().unwrap().apply(img);
            assert!((back.z - q.z).norm() < 1e-10 && (back.t - q.t).abs() < 1e-10);
        }
    }

    #[test]
    fn cyl_map_inverse_and_fibers() {
        let (a, b, ap, bp) = (2.0, 1.0, 1.0, 2.0);
        let f = cyl_f0(a, b, ap, bp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for q in f.source.sample(&mut rng, 40) {
            let img = f.map.apply(q);
            assert!(f.target.contains(img), "{q} -> {img}");
            let back = f.map.inverse.as_ref().unwrap().apply(img);
            assert!((back.z - q.z).norm() < 1e-10 && (back.t - q.t).abs() < 1e-10);
            assert!(cyl_f0_radicand(a, b, ap, bp, q) > 0.0);
        }
    }

    #[test]
    fn radial_stretch_matches_log_conjugation() {
        let a = 2.0;
        let k = 0.5;
        let f = radial_stretch(a, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in f.source.sample(&mut rng, 60) {
            let lc = to_log_coords(p).unwrap();
            let expected = from_log_coords(LogCoords::new(
                k * lc.xi,
                (lc.psi.tan() / k).atan(),
                lc.eta,
            ));
            let img = f.map.apply(p);
            assert!(
                (img.z - expected.z).norm() < 1e-10 && (img.t - expected.t).abs() < 1e-10,
                "{p}: {img} vs {expected}"
            );
        }
    }

    #[test]
    fn g_d_matches_log_conjugation_and_degenerates() {
        let (a, k, d) = (2.0, 0.6, 0.8);
        let g = g_d_map(a, k, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for p in g.source.sample(&mut rng, 60) {
            let lc = to_log_coords(p).unwrap();
            let expected = from_log_coords(LogCoords::new(
                k * lc.xi,
                (lc.psi.tan() / k + d).atan(),
                lc.eta - k * d * lc.xi / 3.0,
            ));
            let img = g.map.apply(p);
            assert!(
                (img.z - expected.z).norm() < 1e-10 && (img.t - expected.t).abs() < 1e-10,
                "{p}: {img} vs {expected}"
            );
        }
        // D = 0 recovers the radial stretch; k = 1, D = 0 is the identity
        let g0 = g_d_map(a, k, 0.0).unwrap();
        let rs = radial_stretch(a, k).unwrap();
        let id = g_d_map(a, 1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in g0.source.sample(&mut rng, 30) {
            let u = g0.map.apply(p);
            let v = rs.map.apply(p);
            assert!((u.z - v.z).norm() < 1e-10 && (u.t - v.t).abs() < 1e-10);
            let w = id.map.apply(p);
            assert!((w.z - p.z).norm() < 1e-10 && (w.t - p.t).abs() < 1e-10);
        }
    }

    #[test]
    fn stretch_inverse_round_trip() {
        let f = radial_stretch(2.0, 0.5).unwrap();
        let inv = f.map.inverse.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for p in f.source.sample(&mut rng, 30) {
            let back = inv.apply(f.map.apply(p));
            assert!((back.z - p.z).norm() < 1e-9 && (back.t - p.t).abs() < 1e-9);
        }
    }

    #[test]
    fn ex3_families_are_trajectories() {
        let a = 2.0;
        let q = qd_pi_dw2_over_w2();
        let horiz = ex3_horizontal_family(a);
        for c in horiz.grid_curves(3) {
            assert!(c.legendrian_defect() < 1e-9);
            assert_eq!(
                c.classify(&q, 1e-6),
                crate::curves::Classification::Horizontal
            );
            // unit q-speed: q(gamma') = 1
            for smp in c.samples.iter().step_by(24) {
                let v = q.on_velocity(smp.point, smp.vel_z);
                assert!((v - C64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
        let vert = ex3_vertical_family(a);
        for c in vert.grid_curves(3) {
            assert!(c.legendrian_defect() < 1e-9);
            assert_eq!(
                c.classify(&q, 1e-6),
                crate::curves::Classification::Vertical
            );
            for smp in c.samples.iter().step_by(24) {
                let v = q.on_velocity(smp.point, smp.vel_z);
                assert!((v + C64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_families_match_log_description() {
        // Example-3 closed forms expressed in (z,t) match the log-coordinate
        // trajectories after to_log_coords
        let y = 1.1;
        let alpha = 0.4;
        let radial = radial_log_closed_form(y, alpha);
        let (z0, t0, _, _) = radial(0.3);
        let lc = to_log_coords(HPoint::new(z0, t0)).unwrap();
        assert!((lc.xi - 0.3).abs() < 1e-12);
        assert!((lc.psi - (y - PI / 2.0)).abs() < 1e-12);
        let arc = spherical_arc_curve(0.5, alpha);
        let (z1, t1, _, _) = arc(0.9);
        let lc1 = to_log_coords(HPoint::new(z1, t1)).unwrap();
        assert!((lc1.xi - 0.5).abs() < 1e-12);
        assert!((lc1.psi - (0.9 - PI / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn load_rejects_unknown_and_bad_params() {
        let p = Params::default_for("ex1");
        assert!(matches!(
            load("no_such_thing", &p),
            Err(Error::UnknownIdentifier(_))
        ));
        let mut bad = p;
        bad.c_p = 100.0;
        assert!(matches!(
            load("ex1_f0", &bad),
            Err(Error::ParameterConstraintViolated(_))
        ));
    }
}

//! Scalar fields on Heisenberg domains and the frame (Z, Zbar, T).
//!
//! A [`Field`] wraps an expression tree together with a name and a domain.
//! First- and second-order applications of
//! Z = d/dz + i conj(z) d/dt, Zbar = d/dzbar - i z d/dt and T = d/dt
//! are assembled from the field's [`Jet2`]; symbolic counterparts produce
//! derived fields that stay exact under further differentiation.
//!
//! Sign convention, checked by `commutator_identity`: Zbar Z - Z Zbar = 2iT.

use crate::error::{Error, Result};
use crate::expr::{self, ExprRef};
use crate::heis::HPoint;
use crate::jet::{Jet2, HXT, HXX, HXY, HYT, HYY, HTT};
use crate::sampling::Domain;
use crate::C64;
use std::fmt;

const I: C64 = C64::new(0.0, 1.0);

/// One of the frame fields Z, Zbar, T.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameOp {
    Z,
    ZBar,
    T,
}

/// A smooth complex-valued field with exact jets.
#[derive(Clone)]
pub struct Field {
    expr: ExprRef,
    name: String,
    domain: Domain,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.name)
    }
}

impl Field {
    pub fn new(expr: ExprRef, name: impl Into<String>) -> Self {
        Self { expr, name: name.into(), domain: Domain::all() }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn expr(&self) -> &ExprRef {
        &self.expr
    }

    pub fn constant(c: C64) -> Self {
        Self::new(expr::cst(c), format!("{}", c))
    }

    pub fn coord_z() -> Self {
        Self::new(expr::var_z(), "z")
    }

    pub fn coord_zbar() -> Self {
        Self::new(expr::var_zbar(), "zbar")
    }

    pub fn coord_t() -> Self {
        Self::new(expr::var_t(), "t")
    }

    /// Polynomial sum of coeff * z^i * zbar^j * t^k terms.
    pub fn poly(terms: &[(u32, u32, u32, C64)]) -> Self {
        let mut acc = expr::cst(C64::new(0.0, 0.0));
        for &(i, j, k, c) in terms {
            let mut term = expr::cst(c);
            term = expr::mul(term, expr::powi(expr::var_z(), i as i32));
            term = expr::mul(term, expr::powi(expr::var_zbar(), j as i32));
            term = expr::mul(term, expr::powi(expr::var_t(), k as i32));
            acc = expr::add(acc, term);
        }
        Self::new(acc, "poly")
    }

    pub fn check_domain(&self, p: HPoint) -> Result<()> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(Error::DomainError(p))
        }
    }

    pub fn eval(&self, p: HPoint) -> C64 {
        self.expr.eval(p)
    }

    pub fn eval_jet(&self, p: HPoint) -> Jet2 {
        self.expr.eval_jet(p)
    }

    pub fn eval_jet_checked(&self, p: HPoint) -> Result<Jet2> {
        self.check_domain(p)?;
        Ok(self.eval_jet(p))
    }

    /// Zf(p), assembled from the jet.
    pub fn eval_z(&self, p: HPoint) -> C64 {
        first_order(FrameOp::Z, &self.eval_jet(p), p)
    }

    /// Zbar f(p), assembled from the jet.
    pub fn eval_zbar(&self, p: HPoint) -> C64 {
        first_order(FrameOp::ZBar, &self.eval_jet(p), p)
    }

    /// Tf(p).
    pub fn eval_t(&self, p: HPoint) -> C64 {
        self.eval_jet(p).g[2]
    }

    pub fn eval_frame(&self, op: FrameOp, p: HPoint) -> C64 {
        first_order(op, &self.eval_jet(p), p)
    }

    /// Frame derivative with the domain check of the operation contract.
    pub fn eval_frame_checked(&self, op: FrameOp, p: HPoint) -> Result<C64> {
        self.check_domain(p)?;
        Ok(self.eval_frame(op, p))
    }

    /// Composition (A o B) f (p) from the jet, e.g. `eval_second(ZBar, Z, p)`
    /// is Zbar(Zf)(p).
    pub fn eval_second(&self, a: FrameOp, b: FrameOp, p: HPoint) -> C64 {
        second_order(a, b, &self.eval_jet(p), p)
    }

    /// CR defect Zbar f(p); zero iff f is CR at p.
    pub fn cr_defect(&self, p: HPoint) -> C64 {
        self.eval_zbar(p)
    }

    /// Symbolic Zf as a new field.
    pub fn z_field(&self) -> Field {
        Field {
            expr: expr::op_z(&self.expr),
            name: format!("Z({})", self.name),
            domain: self.domain.clone(),
        }
    }

    /// Symbolic Zbar f as a new field.
    pub fn zbar_field(&self) -> Field {
        Field {
            expr: expr::op_zbar(&self.expr),
            name: format!("Zbar({})", self.name),
            domain: self.domain.clone(),
        }
    }

    /// Symbolic Tf as a new field.
    pub fn t_field(&self) -> Field {
        Field {
            expr: expr::op_t(&self.expr),
            name: format!("T({})", self.name),
            domain: self.domain.clone(),
        }
    }

    pub fn frame_field(&self, op: FrameOp) -> Field {
        match op {
            FrameOp::Z => self.z_field(),
            FrameOp::ZBar => self.zbar_field(),
            FrameOp::T => self.t_field(),
        }
    }

    pub fn conj_field(&self) -> Field {
        Field {
            expr: expr::conj(self.expr.clone()),
            name: format!("conj({})", self.name),
            domain: self.domain.clone(),
        }
    }

    /// Composition with a map given by component expressions: p -> f(g1(p), g2(p)).
    pub fn compose_with(&self, z_expr: &ExprRef, t_expr: &ExprRef) -> Field {
        Field {
            expr: expr::substitute(&self.expr, z_expr, t_expr),
            name: format!("{}∘map", self.name),
            domain: self.domain.clone(),
        }
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $ctor:path, $sym:expr) => {
        impl std::ops::$trait<&Field> for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                Field {
                    expr: $ctor(self.expr.clone(), rhs.expr.clone()),
                    name: format!("({}{}{})", self.name, $sym, rhs.name),
                    domain: self.domain.clone(),
                }
            }
        }
    };
}

field_binop!(Add, add, expr::add, "+");
field_binop!(Sub, sub, expr::sub, "-");
field_binop!(Mul, mul, expr::mul, "*");
field_binop!(Div, div, expr::div, "/");

impl std::ops::Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        Field {
            expr: expr::neg(self.expr.clone()),
            name: format!("-({})", self.name),
            domain: self.domain.clone(),
        }
    }
}

/// Scale a field by a complex constant, keeping its domain.
pub fn scale(c: C64, f: &Field) -> Field {
    f * &Field::constant(c)
}

fn coeffs(op: FrameOp, p: HPoint) -> (C64, C64, C64) {
    match op {
        FrameOp::Z => (C64::new(0.5, 0.0), C64::new(0.0, -0.5), I * p.z.conj()),
        FrameOp::ZBar => (C64::new(0.5, 0.0), C64::new(0.0, 0.5), -I * p.z),
        FrameOp::T => (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
    }
}

/// Partials of the t-coefficient of the frame field with respect to (x, y).
fn coeff_t_partials(op: FrameOp) -> (C64, C64) {
    match op {
        // d/dx (i zbar) = i, d/dy (i zbar) = 1
        FrameOp::Z => (I, C64::new(1.0, 0.0)),
        // d/dx (-i z) = -i, d/dy (-i z) = 1
        FrameOp::ZBar => (-I, C64::new(1.0, 0.0)),
        FrameOp::T => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
    }
}

fn first_order(op: FrameOp, jet: &Jet2, p: HPoint) -> C64 {
    let (ax, ay, at) = coeffs(op, p);
    ax * jet.g[0] + ay * jet.g[1] + at * jet.g[2]
}

/// (A o B) f from the jet: differentiates g = Bf once more, including the
/// point dependence of B's t-coefficient.
fn second_order(a: FrameOp, b: FrameOp, jet: &Jet2, p: HPoint) -> C64 {
    let (bx, by, bt) = coeffs(b, p);
    let (dbt_dx, dbt_dy) = coeff_t_partials(b);
    let gx = bx * jet.h[HXX] + by * jet.h[HXY] + bt * jet.h[HXT] + dbt_dx * jet.g[2];
    let gy = bx * jet.h[HXY] + by * jet.h[HYY] + bt * jet.h[HYT] + dbt_dy * jet.g[2];
    let gt = bx * jet.h[HXT] + by * jet.h[HYT] + bt * jet.h[HTT];
    let (ax, ay, at) = coeffs(a, p);
    ax * gx + ay * gy + at * gt
}

/// Value and all three frame derivatives of a field at a point, assembled
/// from a single jet evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrder {
    pub v: C64,
    pub zf: C64,
    pub zbf: C64,
    pub tf: C64,
}

impl FirstOrder {
    pub fn of(f: &Field, p: HPoint) -> Self {
        let j = f.eval_jet(p);
        Self::from_jet(&j, p)
    }

    pub fn from_jet(j: &Jet2, p: HPoint) -> Self {
        let dz = (j.g[0] - I * j.g[1]) / 2.0;
        let dzb = (j.g[0] + I * j.g[1]) / 2.0;
        Self {
            v: j.v,
            zf: dz + I * p.z.conj() * j.g[2],
            zbf: dzb - I * p.z * j.g[2],
            tf: j.g[2],
        }
    }

    /// Derivatives of conj(f): Z(conj f) = conj(Zbar f) and so on.
    pub fn conjugated(&self) -> Self {
        Self {
            v: self.v.conj(),
            zf: self.zbf.conj(),
            zbf: self.zf.conj(),
            tf: self.tf.conj(),
        }
    }
}

/// Max of |Zbar Z f - Z Zbar f - 2iT f| over the sample points.
pub fn commutator_defect(f: &Field, points: &[HPoint]) -> f64 {
    points
        .iter()
        .map(|&p| {
            let jet = f.eval_jet(p);
            let zbz = second_order(FrameOp::ZBar, FrameOp::Z, &jet, p);
            let zzb = second_order(FrameOp::Z, FrameOp::ZBar, &jet, p);
            (zbz - zzb - 2.0 * I * jet.g[2]).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64, t: f64) -> HPoint {
        HPoint::from_parts(x, y, t)
    }

    /// The CR projection t + i|z|^2.
    fn cr_projection() -> Field {
        let e = expr::add(
            expr::var_t(),
            expr::mul(expr::cst(I), expr::abs_sqr(expr::var_z())),
        );
        Field::new(e, "t+i|z|^2")
    }

    #[test]
    fn z_of_cr_projection() {
        // Z(t + i|z|^2) = 2i zbar by hand Wirtinger expansion
        let f = cr_projection();
        for &p in &[pt(0.3, 0.5, 1.0), pt(-1.0, 2.0, -0.5), pt(0.0, 0.0, 3.0)] {
            let expected = 2.0 * I * p.z.conj();
            assert!((f.eval_z(p) - expected).norm() < 1e-14);
            assert!(f.cr_defect(p).norm() < 1e-14);
        }
    }

    #[test]
    fn coordinate_fields() {
        let zb = Field::coord_zbar();
        let p = pt(0.7, -0.2, 0.4);
        assert!((zb.eval_zbar(p) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(zb.eval_z(p).norm() < 1e-15);
        assert!(zb.eval_t(p).norm() < 1e-15);
        let z = Field::coord_z();
        assert!(z.cr_defect(p).norm() < 1e-15);
        assert!((Field::coord_zbar().cr_defect(p) - C64::new(1.0, 0.0)).norm() < 1e-15);
        let c = Field::constant(C64::new(2.0, -3.0));
        assert!(c.eval_z(p).norm() == 0.0 && c.eval_zbar(p).norm() == 0.0);
    }

    #[test]
    fn second_order_polynomial() {
        // Zbar^2 (zbar^2) = 2
        let f = Field::poly(&[(0, 2, 0, C64::new(1.0, 0.0))]);
        let p = pt(0.4, 0.9, -1.3);
        let v = f.eval_second(FrameOp::ZBar, FrameOp::ZBar, p);
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn commutator_identity_on_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let f = sampling::random_polynomial(&mut rng, 3);
            let points = sampling::random_points_box(&mut rng, 100, 2.0);
            assert!(commutator_defect(&f, &points) < 1e-12);
        }
    }

    #[test]
    fn cr_field_satisfies_zbar_z_eq_2it() {
        // Zbar Z g = 2iT g for CR g (paper's relation for chart components)
        let g = cr_projection();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in sampling::random_points_box(&mut rng, 50, 2.0) {
            let lhs = g.eval_second(FrameOp::ZBar, FrameOp::Z, p);
            let rhs = 2.0 * I * g.eval_t(p);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn product_rule_via_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = sampling::random_polynomial(&mut rng, 2);
            let g = sampling::random_polynomial(&mut rng, 2);
            let fg = &f * &g;
            for p in sampling::random_points_box(&mut rng, 20, 1.5) {
                let lhs = fg.eval_z(p);
                let rhs = f.eval(p) * g.eval_z(p) + g.eval(p) * f.eval_z(p);
                assert!((lhs - rhs).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn jets_match_central_differences() {
        // first partials vs central differences, O(h^2) with h = 1e-5
        let f = cr_projection();
        let g = Field::poly(&[
            (2, 1, 0, C64::new(1.0, 0.0)),
            (0, 0, 2, C64::new(0.0, 1.0)),
        ]);
        let h = 1e-5;
        for field in [&f, &g] {
            for &p in &[pt(0.3, -0.8, 0.6), pt(1.1, 0.2, -0.4)] {
                let jet = field.eval_jet(p);
                let fd_x = (field.eval(pt(p.x() + h, p.y(), p.t))
                    - field.eval(pt(p.x() - h, p.y(), p.t)))
                    / (2.0 * h);
                let fd_y = (field.eval(pt(p.x(), p.y() + h, p.t))
                    - field.eval(pt(p.x(), p.y() - h, p.t)))
                    / (2.0 * h);
                let fd_t = (field.eval(pt(p.x(), p.y(), p.t + h))
                    - field.eval(pt(p.x(), p.y(), p.t - h)))
                    / (2.0 * h);
                assert!((jet.g[0] - fd_x).norm() < 1e-9);
                assert!((jet.g[1] - fd_y).norm() < 1e-9);
                assert!((jet.g[2] - fd_t).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn symbolic_and_jet_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let f = sampling::random_polynomial(&mut rng, 3);
        for p in sampling::random_points_box(&mut rng, 30, 2.0) {
            assert!((f.z_field().eval(p) - f.eval_z(p)).norm() < 1e-11);
            assert!((f.zbar_field().eval(p) - f.eval_zbar(p)).norm() < 1e-11);
            let sym = f.zbar_field().z_field().eval(p);
            let jet = f.eval_second(FrameOp::Z, FrameOp::ZBar, p);
            assert!((sym - jet).norm() < 1e-10);
        }
    }

    #[test]
    fn domain_error_outside() {
        let f = cr_projection().with_domain(Domain::cylinder(1.0, 1.0));
        assert!(f.eval_jet_checked(pt(0.1, 0.1, 0.5)).is_ok());
        assert!(matches!(
            f.eval_jet_checked(pt(5.0, 0.0, 0.5)),
            Err(Error::DomainError(_))
        ));
    }
}

//! Expression trees for smooth complex-valued functions on the Heisenberg
//! group.
//!
//! Fields are built from the coordinates z, conj(z), t by arithmetic,
//! conjugation and a few elementary functions. The tree is closed under the
//! Wirtinger partials d/dz, d/dzbar, d/dt, so derived coefficient fields
//! (operator outputs) stay exact at every order; evaluation goes through the
//! [`Jet2`] arithmetic.

use crate::heis::HPoint;
use crate::jet::Jet2;
use crate::C64;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum Expr {
    Const(C64),
    /// Horizontal coordinate z = x + iy.
    Z,
    /// conj(z) as an independent leaf; Conj nodes reduce to it where possible.
    ZBar,
    /// Vertical coordinate t (real-valued).
    T,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Conj(Arc<Expr>),
    Powi(Arc<Expr>, i32),
    /// Principal power with a real exponent.
    Powf(Arc<Expr>, f64),
    Sqrt(Arc<Expr>),
    Exp(Arc<Expr>),
    Ln(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Atan(Arc<Expr>),
}

pub type ExprRef = Arc<Expr>;

const C_ZERO: C64 = C64::new(0.0, 0.0);
const C_ONE: C64 = C64::new(1.0, 0.0);

fn as_const(e: &Expr) -> Option<C64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

pub fn cst(c: C64) -> ExprRef {
    Arc::new(Expr::Const(c))
}

pub fn cst_re(x: f64) -> ExprRef {
    cst(C64::new(x, 0.0))
}

pub fn var_z() -> ExprRef {
    Arc::new(Expr::Z)
}

pub fn var_zbar() -> ExprRef {
    Arc::new(Expr::ZBar)
}

pub fn var_t() -> ExprRef {
    Arc::new(Expr::T)
}

pub fn add(a: ExprRef, b: ExprRef) -> ExprRef {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => cst(x + y),
        (Some(x), _) if x == C_ZERO => b,
        (_, Some(y)) if y == C_ZERO => a,
        _ => Arc::new(Expr::Add(a, b)),
    }
}

pub fn sub(a: ExprRef, b: ExprRef) -> ExprRef {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => cst(x - y),
        (_, Some(y)) if y == C_ZERO => a,
        (Some(x), _) if x == C_ZERO => neg(b),
        _ => Arc::new(Expr::Sub(a, b)),
    }
}

pub fn mul(a: ExprRef, b: ExprRef) -> ExprRef {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => cst(x * y),
        (Some(x), _) if x == C_ZERO => cst(C_ZERO),
        (_, Some(y)) if y == C_ZERO => cst(C_ZERO),
        (Some(x), _) if x == C_ONE => b,
        (_, Some(y)) if y == C_ONE => a,
        _ => Arc::new(Expr::Mul(a, b)),
    }
}

pub fn div(a: ExprRef, b: ExprRef) -> ExprRef {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => cst(x / y),
        (Some(x), _) if x == C_ZERO => cst(C_ZERO),
        (_, Some(y)) if y == C_ONE => a,
        _ => Arc::new(Expr::Div(a, b)),
    }
}

pub fn neg(a: ExprRef) -> ExprRef {
    match &*a {
        Expr::Const(c) => cst(-c),
        Expr::Neg(inner) => inner.clone(),
        _ => Arc::new(Expr::Neg(a)),
    }
}

pub fn conj(a: ExprRef) -> ExprRef {
    match &*a {
        Expr::Const(c) => cst(c.conj()),
        Expr::Z => var_zbar(),
        Expr::ZBar => var_z(),
        Expr::T => var_t(),
        Expr::Conj(inner) => inner.clone(),
        _ => Arc::new(Expr::Conj(a)),
    }
}

pub fn powi(a: ExprRef, n: i32) -> ExprRef {
    match (as_const(&a), n) {
        (Some(x), _) => cst(x.powi(n)),
        (_, 0) => cst(C_ONE),
        (_, 1) => a,
        _ => Arc::new(Expr::Powi(a, n)),
    }
}

pub fn powf(a: ExprRef, c: f64) -> ExprRef {
    Arc::new(Expr::Powf(a, c))
}

pub fn sqrt(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Sqrt(a))
}

pub fn exp(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Exp(a))
}

pub fn ln(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Ln(a))
}

pub fn sin(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Sin(a))
}

pub fn cos(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Cos(a))
}

pub fn atan(a: ExprRef) -> ExprRef {
    Arc::new(Expr::Atan(a))
}

/// |e|^2 = e conj(e).
pub fn abs_sqr(a: ExprRef) -> ExprRef {
    mul(a.clone(), conj(a))
}

/// Real part as (e + conj e)/2.
pub fn re_part(a: ExprRef) -> ExprRef {
    mul(cst_re(0.5), add(a.clone(), conj(a)))
}

/// Imaginary part as (e - conj e)/(2i).
pub fn im_part(a: ExprRef) -> ExprRef {
    mul(cst(C64::new(0.0, -0.5)), sub(a.clone(), conj(a)))
}

#[derive(Clone, Copy)]
enum Partial {
    DZ,
    DZBar,
    DT,
}

/// Derivative of the holomorphic wrapper of `inner` times the chain factor.
fn unary_chain(e: &Expr, inner: &ExprRef, dinner: ExprRef) -> ExprRef {
    let d_outer = match e {
        Expr::Powi(_, n) => mul(cst_re(*n as f64), powi(inner.clone(), n - 1)),
        Expr::Powf(_, c) => mul(cst_re(*c), powf(inner.clone(), c - 1.0)),
        Expr::Sqrt(_) => div(cst_re(0.5), sqrt(inner.clone())),
        Expr::Exp(_) => exp(inner.clone()),
        Expr::Ln(_) => div(cst_re(1.0), inner.clone()),
        Expr::Sin(_) => cos(inner.clone()),
        Expr::Cos(_) => neg(sin(inner.clone())),
        Expr::Atan(_) => div(cst_re(1.0), add(cst_re(1.0), powi(inner.clone(), 2))),
        _ => unreachable!(),
    };
    mul(d_outer, dinner)
}

fn partial(e: &ExprRef, which: Partial) -> ExprRef {
    match &**e {
        Expr::Const(_) => cst(C_ZERO),
        Expr::Z => cst(match which {
            Partial::DZ => C_ONE,
            _ => C_ZERO,
        }),
        Expr::ZBar => cst(match which {
            Partial::DZBar => C_ONE,
            _ => C_ZERO,
        }),
        Expr::T => cst(match which {
            Partial::DT => C_ONE,
            _ => C_ZERO,
        }),
        Expr::Add(a, b) => add(partial(a, which), partial(b, which)),
        Expr::Sub(a, b) => sub(partial(a, which), partial(b, which)),
        Expr::Mul(a, b) => add(
            mul(partial(a, which), b.clone()),
            mul(a.clone(), partial(b, which)),
        ),
        Expr::Div(a, b) => div(
            sub(
                mul(partial(a, which), b.clone()),
                mul(a.clone(), partial(b, which)),
            ),
            powi(b.clone(), 2),
        ),
        Expr::Neg(a) => neg(partial(a, which)),
        // d/dz conj(g) = conj(d/dzbar g); d/dt commutes with conj
        Expr::Conj(a) => conj(partial(a, which.flip())),
        Expr::Powi(a, _)
        | Expr::Powf(a, _)
        | Expr::Sqrt(a)
        | Expr::Exp(a)
        | Expr::Ln(a)
        | Expr::Sin(a)
        | Expr::Cos(a)
        | Expr::Atan(a) => unary_chain(e, a, partial(a, which)),
    }
}

impl Partial {
    fn flip(&self) -> Partial {
        match self {
            Partial::DZ => Partial::DZBar,
            Partial::DZBar => Partial::DZ,
            Partial::DT => Partial::DT,
        }
    }
}

/// Wirtinger partial d/dz as a new expression.
pub fn d_z(e: &ExprRef) -> ExprRef {
    partial(e, Partial::DZ)
}

/// Wirtinger partial d/dzbar as a new expression.
pub fn d_zbar(e: &ExprRef) -> ExprRef {
    partial(e, Partial::DZBar)
}

/// Partial d/dt as a new expression.
pub fn d_t(e: &ExprRef) -> ExprRef {
    partial(e, Partial::DT)
}

/// Left-invariant CR field Z = d/dz + i conj(z) d/dt applied symbolically.
pub fn op_z(e: &ExprRef) -> ExprRef {
    add(d_z(e), mul(mul(cst(C64::new(0.0, 1.0)), var_zbar()), d_t(e)))
}

/// Conjugate field Zbar = d/dzbar - i z d/dt applied symbolically.
pub fn op_zbar(e: &ExprRef) -> ExprRef {
    sub(d_zbar(e), mul(mul(cst(C64::new(0.0, 1.0)), var_z()), d_t(e)))
}

/// Reeb field T = d/dt applied symbolically.
pub fn op_t(e: &ExprRef) -> ExprRef {
    d_t(e)
}

/// Substitute expressions for the coordinate leaves: z -> z_sub, t -> t_sub
/// (and conj(z) -> conj(z_sub)). Used to compose fields with contact maps.
pub fn substitute(e: &ExprRef, z_sub: &ExprRef, t_sub: &ExprRef) -> ExprRef {
    match &**e {
        Expr::Const(c) => cst(*c),
        Expr::Z => z_sub.clone(),
        Expr::ZBar => conj(z_sub.clone()),
        Expr::T => t_sub.clone(),
        Expr::Add(a, b) => add(substitute(a, z_sub, t_sub), substitute(b, z_sub, t_sub)),
        Expr::Sub(a, b) => sub(substitute(a, z_sub, t_sub), substitute(b, z_sub, t_sub)),
        Expr::Mul(a, b) => mul(substitute(a, z_sub, t_sub), substitute(b, z_sub, t_sub)),
        Expr::Div(a, b) => div(substitute(a, z_sub, t_sub), substitute(b, z_sub, t_sub)),
        Expr::Neg(a) => neg(substitute(a, z_sub, t_sub)),
        Expr::Conj(a) => conj(substitute(a, z_sub, t_sub)),
        Expr::Powi(a, n) => powi(substitute(a, z_sub, t_sub), *n),
        Expr::Powf(a, c) => powf(substitute(a, z_sub, t_sub), *c),
        Expr::Sqrt(a) => sqrt(substitute(a, z_sub, t_sub)),
        Expr::Exp(a) => exp(substitute(a, z_sub, t_sub)),
        Expr::Ln(a) => ln(substitute(a, z_sub, t_sub)),
        Expr::Sin(a) => sin(substitute(a, z_sub, t_sub)),
        Expr::Cos(a) => cos(substitute(a, z_sub, t_sub)),
        Expr::Atan(a) => atan(substitute(a, z_sub, t_sub)),
    }
}

impl Expr {
    /// Full second-order jet at p.
    pub fn eval_jet(&self, p: HPoint) -> Jet2 {
        match self {
            Expr::Const(c) => Jet2::constant(*c),
            Expr::Z => Jet2::coord_z(p.z),
            Expr::ZBar => Jet2::coord_zbar(p.z),
            Expr::T => Jet2::coord_t(p.t),
            Expr::Add(a, b) => a.eval_jet(p) + b.eval_jet(p),
            Expr::Sub(a, b) => a.eval_jet(p) - b.eval_jet(p),
            Expr::Mul(a, b) => a.eval_jet(p) * b.eval_jet(p),
            Expr::Div(a, b) => a.eval_jet(p) / b.eval_jet(p),
            Expr::Neg(a) => -a.eval_jet(p),
            Expr::Conj(a) => a.eval_jet(p).conj(),
            Expr::Powi(a, n) => a.eval_jet(p).powi(*n),
            Expr::Powf(a, c) => a.eval_jet(p).powf(*c),
            Expr::Sqrt(a) => a.eval_jet(p).sqrt(),
            Expr::Exp(a) => a.eval_jet(p).exp(),
            Expr::Ln(a) => a.eval_jet(p).ln(),
            Expr::Sin(a) => a.eval_jet(p).sin(),
            Expr::Cos(a) => a.eval_jet(p).cos(),
            Expr::Atan(a) => a.eval_jet(p).atan(),
        }
    }

    /// Plain value at p, no derivatives.
    pub fn eval(&self, p: HPoint) -> C64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Z => p.z,
            Expr::ZBar => p.z.conj(),
            Expr::T => C64::new(p.t, 0.0),
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Div(a, b) => a.eval(p) / b.eval(p),
            Expr::Neg(a) => -a.eval(p),
            Expr::Conj(a) => a.eval(p).conj(),
            Expr::Powi(a, n) => a.eval(p).powi(*n),
            Expr::Powf(a, c) => a.eval(p).powf(*c),
            Expr::Sqrt(a) => a.eval(p).sqrt(),
            Expr::Exp(a) => a.eval(p).exp(),
            Expr::Ln(a) => a.eval(p).ln(),
            Expr::Sin(a) => a.eval(p).sin(),
            Expr::Cos(a) => a.eval(p).cos(),
            Expr::Atan(a) => a.eval(p).atan(),
        }
    }
}

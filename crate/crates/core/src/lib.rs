//! Calculus toolkit for the Heisenberg group.
//!
//! The crate implements, in coordinates, the split Rumin operators on the
//! Heisenberg group, the holomorphy operators on quadratic differentials and
//! higher-degree forms, trajectory foliations with their q-lengths,
//! quasiconformal distortion, and moduli of Legendrian curve families.
//! A catalog of explicit domains, maps and differentials wires all of it to
//! automated verification.

pub mod catalog;
pub mod curves;
pub mod error;
pub mod expr;
pub mod field;
pub mod heis;
pub mod jet;
pub mod moduli;
pub mod qc;
pub mod quad_diff;
pub mod quadrature;
pub mod report;
pub mod rumin;
pub mod sampling;

pub use curves::{Classification, LegendrianCurve, TraceMode};
pub use error::{Error, Result};
pub use expr::Expr;
pub use field::Field;
pub use heis::{CylCoords, HPoint, LogCoords};
pub use jet::Jet2;
pub use moduli::CurveFamily;
pub use qc::{ContactMap, Density};
pub use quad_diff::{KForm, QuadDiff};
pub use rumin::FormPQ;
pub use sampling::Domain;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

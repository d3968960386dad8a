//! Serializable report payloads shared by the library and the CLI.
//!
//! All reports carry `schema: 1`; struct field order is fixed, so identical
//! runs serialize byte-identically.

use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct OperatorReport {
    pub schema: u32,
    pub subject: String,
    pub points: usize,
    pub seed: u64,
    pub d2prime_max: f64,
    pub d2second_max: f64,
    pub b2_max: f64,
    pub b2_vanishes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub schema: u32,
    pub field: String,
    pub points: usize,
    pub relations: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    pub schema: u32,
    pub map: String,
    pub k_max: f64,
    pub mean_distortion: Option<f64>,
    pub contact_defect_max: f64,
    pub beltrami_sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    pub schema: u32,
    pub family: String,
    pub density: String,
    pub margin: f64,
    pub energy: f64,
    pub modulus_upper_bound: Option<f64>,
    pub inequalities: Vec<InequalityCheck>,
}

/// One named check inside a catalog verification run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    /// |value - expected| <= tolerance.
    pub fn absolute(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }

    /// |value/expected - 1| <= tolerance.
    pub fn relative(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: ((value - expected) / expected).abs() <= tolerance,
        }
    }

    /// value <= bound.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: 0.0,
            tolerance: bound,
            pass: value <= bound,
        }
    }

    pub fn predicate(name: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), value: 0.0, expected: 0.0, tolerance: 0.0, pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub example: String,
    pub params: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn new(example: impl Into<String>, params: BTreeMap<String, f64>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            example: example.into(),
            params,
            checks: Vec::new(),
            all_pass: true,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.all_pass &= check.pass;
        self.checks.push(check);
    }

    pub fn note(&mut self, name: impl Into<String>) {
        self.checks.push(CheckResult::predicate(name, true));
    }
}

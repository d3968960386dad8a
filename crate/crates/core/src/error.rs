use crate::heis::HPoint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("the group origin has no logarithmic coordinates")]
    OriginNotRepresentable,

    #[error("point {0} is outside the field's domain")]
    DomainError(HPoint),

    #[error("map is not contact: defect {defect:.3e} at {point}")]
    NotContact { point: HPoint, defect: f64 },

    #[error("form is not D-closed: operator defect {defect:.3e} at {point}")]
    NotClosed { point: HPoint, defect: f64 },

    #[error("integration path leaves the domain at {0}")]
    PathOutsideDomain(HPoint),

    #[error("derivative degenerate at {point}: |Zf1| = {magnitude:.3e}")]
    DegenerateDerivative { point: HPoint, magnitude: f64 },

    #[error("trace hit a zero of the differential at {point} after {steps} steps")]
    HitZero { point: HPoint, steps: usize },

    #[error("trace left the domain at {point} after {steps} steps")]
    LeftDomain { point: HPoint, steps: usize },

    #[error("image curve is neither horizontal nor vertical for the target differential")]
    ImageNotTrajectory,

    #[error("density is not admissible: margin {margin:.6} < 1")]
    NotAdmissible { margin: f64 },

    #[error("quadrature did not converge: levels differ by {diff:.3e} (tol {tol:.1e})")]
    QuadratureNotConverged { diff: f64, tol: f64 },

    #[error("{operator} does not vanish: defect {defect:.3e}")]
    OperatorsNonzero { operator: &'static str, defect: f64 },

    #[error("the differential vanishes at the chart base point")]
    ZeroAtBase,

    #[error("square-root branch cannot be continued: |q| = {magnitude:.3e} on the path")]
    BranchCutCrossed { magnitude: f64 },

    #[error("unknown catalog identifier: {0}")]
    UnknownIdentifier(String),

    #[error("parameter constraint violated: {0}")]
    ParameterConstraintViolated(String),
}

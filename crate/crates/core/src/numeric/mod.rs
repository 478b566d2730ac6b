//! Difference quotients, h-sweeps and the counterexample catalog.

mod conditioning;
mod functions;
mod quotient;
mod sweep;

use thiserror::Error;

use crate::rational::Rational;
use crate::stencil::StencilError;

pub use conditioning::{compare, conditioning_report, CompareTable, ConditioningReport, MethodSummary};
pub use functions::{builtin_functions, in_group_23, Polynomial, TestFunction};
pub use quotient::{compensated_sum, evaluate_quotient, quotient_exact, quotient_f64, Mode, QuotientValue};
pub use sweep::{
    cluster_values, estimate_limit, estimate_limit_with, peano_profile, peano_profile_with, reports_to_csv,
    shift_family_report, shift_family_report_with, EstimateReport, Method, PeanoEntry, PeanoProfile, Sample,
    ShiftFamilyReport, SweepMode, SweepParams, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step h must be nonzero")]
    ZeroStep,
    #[error("{function} has no exact value at {point}")]
    ExactUnavailable { function: String, point: String },
    #[error("expected a positive rational, got {0}")]
    NonPositive(Rational),
    #[error("invalid sweep parameters: {0}")]
    InvalidParams(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error(transparent)]
    Stencil(#[from] StencilError),
}

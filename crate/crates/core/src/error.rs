use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Witness that a proposed solution of a reduced problem is infeasible.
/// Indices are 0-based; `Display` renders them 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Both endpoints of an edge were selected.
    Edge(usize, usize),
    /// A clause is not satisfied under the formula's semantics.
    ViolatedClause(usize),
    /// A variable was forced both true and false.
    ConflictingVariable(usize),
    /// A vertex or variable index is out of range.
    OutOfRange(usize),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Edge(i, j) => write!(f, "vertices {} and {} are adjacent", i + 1, j + 1),
            Certificate::ViolatedClause(k) => write!(f, "clause {} is violated", k + 1),
            Certificate::ConflictingVariable(v) => write!(f, "variable {} is assigned both values", v + 1),
            Certificate::OutOfRange(i) => write!(f, "index {} is out of range", i + 1),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("not an EC3 instance: element {} appears in {count} subsets", .element + 1)]
    NotEc3 { element: usize, count: usize },
    #[error("formula semantics {found} not accepted here (expected {expected})")]
    WrongSemantics { expected: &'static str, found: &'static str },
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("infeasible solution: {0}")]
    Infeasible(Certificate),
    #[error("coupling on edge ({}, {}) violates {constraint}", .edge.0 + 1, .edge.1 + 1)]
    InvalidCoupling { edge: (usize, usize), constraint: String },
    #[error("{what} has size {size}, above the cap of {cap}")]
    SizeCap { what: &'static str, size: usize, cap: usize },
    #[error("eigensolver did not converge after {iterations} restarts; residual norms {residuals:?}")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },
    #[error("norm drift {drift:.3e} exceeds {bound:.1e} at step {step}")]
    NormDrift { drift: f64, bound: f64, step: usize },
    #[error("time step {dt} exceeds the stability bound {max}")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

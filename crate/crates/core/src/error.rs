use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", join(.0))]
    InvalidModel(Vec<Violation>),

    #[error("invalid waiting law: {0}")]
    InvalidLaw(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown site label `{0}`")]
    UnknownLabel(String),

    #[error("nubar undefined: the absolutely continuous part carries no 1/tau mass")]
    NubarUndefined,

    #[error("test function is not normalized: sum of mu*exp(tau*f) = {total}")]
    NotNormalized { total: f64 },

    #[error("exact enumeration exceeds size cap: {0}")]
    SizeCap(String),

    #[error("solver did not converge after {iterations} iterations (best value {best}, residual {residual:e})")]
    NonConvergence { iterations: usize, best: f64, residual: f64 },

    #[error("empty window [{lower}, {upper}] for state `{state}`")]
    EmptyWindow { state: String, lower: f64, upper: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

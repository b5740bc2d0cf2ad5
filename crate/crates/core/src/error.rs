use crate::expr::{EvalError, ParseError};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] EvalError),
    #[error("`{function}` is not differentiable at a zero argument (x = {x})")]
    Kink { function: &'static str, x: f64 },
    #[error("jet base point mismatch: outer jet at {outer}, inner jet value {inner}")]
    BasePointMismatch { outer: f64, inner: f64 },
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("derivative order {order} exceeds the configured cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("orbit left the domain at step {step}{}", .value.map(|v| format!(" (value {v})")).unwrap_or_default())]
    Escape { step: usize, value: Option<f64> },
    #[error("index contract violated: {0}")]
    IndexContract(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("map is not strictly monotone on [{a}, {b}]")]
    NotMonotone { a: f64, b: f64 },
    #[error("value {y} is not attained on [{a}, {b}]")]
    NoBracket { y: f64, a: f64, b: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },
    #[error("contraction violated: sampled sup |f'| = {lipschitz} >= 1")]
    ContractionViolation { lipschitz: f64 },
    #[error("function is not even: f({x}) != f(-{x})")]
    NotEven { x: f64 },
    #[error("not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("quadrature on [{a}, {b}] did not reach the requested tolerance")]
    Quadrature { a: f64, b: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

use super::{Binary, Node, Unary};
use thiserror::Error;

/// Evaluation outside the natural domain of some subexpression.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{subexpression}` at x = {x}: {reason}")]
pub struct EvalError {
    pub subexpression: String,
    pub x: f64,
    pub reason: String,
}

pub(crate) fn apply_unary(op: Unary, a: f64) -> Result<f64, &'static str> {
    Ok(match op {
        Unary::Neg => -a,
        Unary::Abs => a.abs(),
        Unary::Sqrt if a < 0.0 => return Err("sqrt of a negative number"),
        Unary::Sqrt => a.sqrt(),
        Unary::Exp => a.exp(),
        Unary::Log if a <= 0.0 => return Err("log of a non-positive number"),
        Unary::Log => a.ln(),
        Unary::Sin => a.sin(),
        Unary::Cos => a.cos(),
        Unary::Tanh => a.tanh(),
        Unary::Sign if a > 0.0 => 1.0,
        Unary::Sign if a < 0.0 => -1.0,
        Unary::Sign => 0.0,
    })
}

pub(crate) fn apply_pow(base: f64, p: f64) -> Result<f64, &'static str> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        if base == 0.0 && p < 0.0 {
            return Err("negative power of zero");
        }
        return Ok(base.powi(p as i32));
    }
    if base < 0.0 {
        return Err("non-integer power of a negative number");
    }
    if base == 0.0 && p < 0.0 {
        return Err("negative power of zero");
    }
    Ok(base.powf(p))
}

pub(crate) fn evaluate(node: &Node, x: f64) -> Result<f64, EvalError> {
    let fail = |reason: &str| EvalError {
        subexpression: super::Expression::new(node.clone()).to_string(),
        x,
        reason: reason.to_string(),
    };
    let value = match node {
        Node::Const(c) => *c,
        Node::Var => x,
        Node::Unary(op, a) => apply_unary(*op, evaluate(a, x)?).map_err(fail)?,
        Node::Binary(op, a, b) => {
            let (a, b) = (evaluate(a, x)?, evaluate(b, x)?);
            match op {
                Binary::Add => a + b,
                Binary::Sub => a - b,
                Binary::Mul => a * b,
                Binary::Div if b == 0.0 => return Err(fail("division by zero")),
                Binary::Div => a / b,
            }
        }
        Node::Pow(a, p) => apply_pow(evaluate(a, x)?, *p).map_err(fail)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(fail("non-finite result"))
    }
}

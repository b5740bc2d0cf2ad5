use super::series;
use crate::expr::{Binary, EvalError, Expression, Node, Unary};
use crate::{Error, Result};

struct Lift {
    x: f64,
    len: usize,
}

impl Lift {
    fn domain(&self, node: &Node, reason: &str) -> Error {
        Error::Domain(EvalError {
            subexpression: Expression::new(node.clone()).to_string(),
            x: self.x,
            reason: reason.to_string(),
        })
    }

    fn kink(&self, function: &'static str) -> Error {
        Error::Kink { function, x: self.x }
    }

    fn eval(&self, node: &Node) -> Result<Vec<f64>> {
        let out = match node {
            Node::Const(c) => series::constant(*c, self.len),
            Node::Var => series::variable(self.x, self.len),
            Node::Unary(op, a) => {
                let a = self.eval(a)?;
                let a0 = a[0];
                let higher = self.len > 1;
                match op {
                    Unary::Neg => series::neg(&a),
                    Unary::Abs if a0 > 0.0 => a,
                    Unary::Abs if a0 < 0.0 => series::neg(&a),
                    Unary::Abs if higher => return Err(self.kink("abs")),
                    Unary::Abs => series::constant(0.0, self.len),
                    Unary::Sign if a0 != 0.0 => series::constant(a0.signum(), self.len),
                    Unary::Sign if higher => return Err(self.kink("sign")),
                    Unary::Sign => series::constant(0.0, self.len),
                    Unary::Sqrt if a0 > 0.0 => series::sqrt(&a),
                    Unary::Sqrt if a0 == 0.0 && !higher => series::constant(0.0, self.len),
                    Unary::Sqrt => return Err(self.domain(node, "sqrt needs a positive argument")),
                    Unary::Exp => series::exp(&a),
                    Unary::Log if a0 > 0.0 => series::ln(&a),
                    Unary::Log => return Err(self.domain(node, "log of a non-positive number")),
                    Unary::Sin => series::sin_cos(&a).0,
                    Unary::Cos => series::sin_cos(&a).1,
                    Unary::Tanh => series::tanh(&a),
                }
            }
            Node::Binary(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    Binary::Add => series::add(&a, &b),
                    Binary::Sub => series::sub(&a, &b),
                    Binary::Mul => series::mul(&a, &b),
                    Binary::Div if b[0] == 0.0 => return Err(self.domain(node, "division by zero")),
                    Binary::Div => series::div(&a, &b),
                }
            }
            Node::Pow(a, p) => {
                let a = self.eval(a)?;
                self.pow(node, &a, *p)?
            }
        };
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(self.domain(node, "non-finite result"))
        }
    }

    fn pow(&self, node: &Node, a: &[f64], p: f64) -> Result<Vec<f64>> {
        let a0 = a[0];
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let k = p.abs() as u32;
            let positive = series::powi(a, k);
            if p >= 0.0 {
                return Ok(positive);
            }
            if a0 == 0.0 {
                return Err(self.domain(node, "negative power of zero"));
            }
            return Ok(series::div(&series::constant(1.0, self.len), &positive));
        }
        if a0 > 0.0 {
            Ok(series::powf(a, p))
        } else if a0 == 0.0 && p > 0.0 && self.len == 1 {
            Ok(series::constant(0.0, 1))
        } else {
            Err(self.domain(node, "non-integer power needs a positive base"))
        }
    }
}

/// Normalized Taylor coefficients of `e` at `x` up to `order`.
pub(crate) fn lift_series(e: &Expression, x: f64, order: usize) -> Result<Vec<f64>> {
    Lift { x, len: order + 1 }.eval(e.root())
}

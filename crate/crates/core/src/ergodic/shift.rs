use num_complex::Complex64;

use super::power::apply_power_derivative;
use super::WeightedSymbol;
use crate::dynamics::{derivative_sign, orbit};
use crate::expr::{Expression, Polynomial};
use crate::{Error, Result};

/// Both sides of `(C^n_{|φ′|,φ} f)^{(r)}(x) = (C^n_{sign φ′,φ} F)^{(r+1)}(x)`
/// with `F` the primitive of the polynomial `f` vanishing at 0.
///
/// Only `φ` and the domain of `op` are used; the weight is replaced.
pub fn antiderivative_shift_check(op: &WeightedSymbol, f: &Expression, n: usize, r: usize, x: f64) -> Result<(Complex64, Complex64)> {
    let poly = Polynomial::from_expression(f).ok_or_else(|| Error::NotPolynomial(f.to_string()))?;
    let primitive = poly.antiderivative().to_expression();
    let points = orbit(op.phi(), x, n, op.domain())?;
    if derivative_sign(op.phi(), &points)?.is_none() {
        return Err(Error::Precondition("symbol derivative changes sign along the orbit".into()));
    }
    let derivative = op.phi().differentiate();
    let one = Complex64::new(1.0, 0.0);
    let abs_op = op.clone().with_weight(derivative.abs(), one);
    let sign_op = op.clone().with_weight(derivative.sign(), one);
    let left = apply_power_derivative(&abs_op, f, n, r, x)?;
    let right = apply_power_derivative(&sign_op, &primitive, n, r + 1, x)?;
    Ok((left, right))
}

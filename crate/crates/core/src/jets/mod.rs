//! Truncated Taylor jets: a base point plus raw derivatives `f^(j)(x0)`,
//! `j = 0..=s` (not divided by `j!`).
//!
//! Jets are the route to derivatives of iterates `(φⁿ)^(j)` and of weight
//! products: every iterate is obtained by lifting `φ` at the current orbit
//! point and composing onto the accumulated jet, so no symbolic iterate is
//! ever built.

mod lift;
pub(crate) mod series;

use crate::expr::Expression;
use crate::{Error, Result};

/// Default cap on derivative orders used by the operator engine.
pub const DEFAULT_ORDER_CAP: usize = 8;

/// Hard upper limit on jet orders.
pub const MAX_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base_point: f64,
    derivs: Vec<f64>,
}

impl Jet {
    pub fn new(base_point: f64, derivs: Vec<f64>) -> Result<Self> {
        if derivs.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, found: 0 });
        }
        if derivs.len() > MAX_ORDER + 1 {
            return Err(Error::OrderCap { order: derivs.len() - 1, cap: MAX_ORDER });
        }
        if !base_point.is_finite() || derivs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("jet at {base_point}")));
        }
        Ok(Self { base_point, derivs })
    }

    pub fn constant(base_point: f64, value: f64, order: usize) -> Self {
        Self { base_point, derivs: series::constant(value, order + 1) }
    }

    /// Jet of `x ↦ x` at `base_point`.
    pub fn identity(base_point: f64, order: usize) -> Self {
        Self { base_point, derivs: series::variable(base_point, order + 1) }
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.derivs[0]
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn deriv(&self, j: usize) -> f64 {
        self.derivs[j]
    }

    /// Drops derivatives above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        Jet { base_point: self.base_point, derivs: self.derivs[..=order.min(self.order())].to_vec() }
    }

    pub fn scale(&self, c: f64) -> Result<Jet> {
        Jet::new(self.base_point, self.derivs.iter().map(|v| v * c).collect())
    }

    fn taylor(&self) -> Vec<f64> {
        series::from_raw(&self.derivs)
    }

    fn from_taylor(base_point: f64, coeffs: &[f64]) -> Result<Jet> {
        Jet::new(base_point, series::to_raw(coeffs))
    }
}

/// Something that can be evaluated and differentiated to a given order.
pub trait SmoothFunction: Sync {
    fn value(&self, x: f64) -> Result<f64>;

    fn jet(&self, x: f64, order: usize) -> Result<Jet>;
}

impl SmoothFunction for Expression {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?)
    }

    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        jet_lift(self, x, order)
    }
}

impl<T: SmoothFunction + ?Sized> SmoothFunction for &T {
    fn value(&self, x: f64) -> Result<f64> {
        (**self).value(x)
    }

    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        (**self).jet(x, order)
    }
}

/// Jet of `e` at `x` by forward propagation of truncated series through
/// the AST.
pub fn jet_lift(e: &Expression, x: f64, order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::OrderCap { order, cap: MAX_ORDER });
    }
    let coeffs = lift::lift_series(e, x, order)?;
    Jet::from_taylor(x, &coeffs)
}

fn check_orders(a: &Jet, b: &Jet) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch { left: a.order(), right: b.order() });
    }
    Ok(())
}

/// Jet of `outer ∘ inner` at `inner.base_point()`; `outer` must be based at
/// `inner.value()` (relative tolerance 1e-9).
pub fn jet_compose(outer: &Jet, inner: &Jet) -> Result<Jet> {
    check_orders(outer, inner)?;
    let g = inner.value();
    if (outer.base_point - g).abs() > 1e-9 * (1.0 + g.abs()) {
        return Err(Error::BasePointMismatch { outer: outer.base_point, inner: g });
    }
    let coeffs = series::compose(&outer.taylor(), &inner.taylor());
    Jet::from_taylor(inner.base_point, &coeffs)
}

/// Leibniz product: `(ab)^(s) = Σ_r C(s,r) a^(s-r) b^(r)`.
pub fn jet_multiply(a: &Jet, b: &Jet) -> Result<Jet> {
    check_orders(a, b)?;
    if (a.base_point - b.base_point).abs() > 1e-9 * (1.0 + a.base_point.abs()) {
        return Err(Error::BasePointMismatch { outer: a.base_point, inner: b.base_point });
    }
    let derivs = (0..=a.order())
        .map(|s| {
            (0..=s)
                .map(|r| crate::combinatorics::binomial_f64(s, r) * a.derivs[s - r] * b.derivs[r])
                .sum()
        })
        .collect();
    Jet::new(a.base_point, derivs)
}

/// Quotient `a / b`; requires `b.value() != 0`.
pub fn jet_divide(a: &Jet, b: &Jet) -> Result<Jet> {
    check_orders(a, b)?;
    if (a.base_point - b.base_point).abs() > 1e-9 * (1.0 + a.base_point.abs()) {
        return Err(Error::BasePointMismatch { outer: a.base_point, inner: b.base_point });
    }
    if b.value() == 0.0 {
        return Err(Error::Precondition(format!("division by a jet vanishing at {}", b.base_point)));
    }
    Jet::from_taylor(a.base_point, &series::div(&a.taylor(), &b.taylor()))
}

/// Jet of the local inverse of a map at the image point `jet.value()`,
/// given the map's jet at its base point. Requires a nonzero first
/// derivative.
pub fn jet_inverse(jet: &Jet) -> Result<Jet> {
    if jet.order() >= 1 && jet.derivs[1] == 0.0 {
        return Err(Error::Precondition(format!(
            "inverse jet needs a nonzero derivative at {}",
            jet.base_point
        )));
    }
    let mut coeffs = series::reversion(&jet.taylor());
    coeffs[0] = jet.base_point;
    Jet::from_taylor(jet.value(), &coeffs)
}

/// Jets of `φ^m` at `x` for `m = 0..=n`.
///
/// A failure to lift `φ` at `φ^{m-1}(x)` is reported as an escape at step `m`.
pub fn iterate_jets<F: SmoothFunction + ?Sized>(phi: &F, x: f64, n: usize, order: usize) -> Result<Vec<Jet>> {
    if order > MAX_ORDER {
        return Err(Error::OrderCap { order, cap: MAX_ORDER });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(Jet::identity(x, order));
    for m in 1..=n {
        let prev = &out[m - 1];
        let point = prev.value();
        let step = phi
            .jet(point, order)
            .and_then(|j| jet_compose(&j, prev))
            .map_err(|_| Error::Escape { step: m, value: None })?;
        out.push(step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn lift(src: &str, x: f64, s: usize) -> Jet {
        jet_lift(&parse(src).unwrap(), x, s).unwrap()
    }

    #[test]
    fn lifts_polynomial_and_exp() {
        assert_eq!(lift("x^2", 3.0, 3).derivs(), &[9.0, 6.0, 2.0, 0.0]);
        assert_eq!(lift("exp(x)", 0.0, 4).derivs(), &[1.0; 5]);
    }

    #[test]
    fn lifts_involution_symbol_at_zero() {
        let j = lift("-3*x+sqrt(8*x^2+2)", 0.0, 1);
        assert!((j.deriv(0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((j.deriv(1) + 3.0).abs() < 1e-15);
    }

    #[test]
    fn quotient_of_jets() {
        let q = jet_divide(&lift("sin(x)", 0.4, 4), &lift("cos(x)", 0.4, 4)).unwrap();
        let t = lift("sin(x)/cos(x)", 0.4, 4);
        for (a, b) in q.derivs().iter().zip(t.derivs()) {
            assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()));
        }
        assert!(jet_divide(&lift("x", 0.0, 1), &lift("x", 0.0, 1)).is_err());
    }

    #[test]
    fn kinks_and_domain_errors() {
        let e = parse("abs(x)").unwrap();
        assert_eq!(jet_lift(&e, 0.0, 0).unwrap().value(), 0.0);
        assert!(matches!(jet_lift(&e, 0.0, 1), Err(Error::Kink { .. })));
        assert!(matches!(jet_lift(&parse("log(x)").unwrap(), -1.0, 2), Err(Error::Domain(_))));
        assert!(matches!(jet_lift(&parse("sqrt(x)").unwrap(), 0.0, 1), Err(Error::Domain(_))));
        assert!(jet_lift(&e, 1.0, 13).is_err());
        assert_eq!(lift("abs(x)", -2.0, 2).derivs(), &[2.0, -1.0, 0.0]);
        assert_eq!(lift("sign(x)", -2.0, 2).derivs(), &[-1.0, 0.0, 0.0]);
    }

    #[test]
    fn powers() {
        let j = lift("x^-2", 2.0, 2);
        assert!((j.deriv(0) - 0.25).abs() < 1e-15);
        assert!((j.deriv(1) + 0.25).abs() < 1e-15);
        assert!((j.deriv(2) - 0.375).abs() < 1e-15);
        let j = lift("x^1.5", 4.0, 2);
        assert!((j.deriv(2) - 0.375).abs() < 1e-15);
        let j = lift("(x-1)^3", 1.0, 3);
        assert_eq!(j.derivs(), &[0.0, 0.0, 0.0, 6.0]);
    }

    #[test]
    fn compose_with_identity_is_inner() {
        let inner = lift("sin(x) + x^2", 0.4, 5);
        let id = Jet::identity(inner.value(), 5);
        let out = jet_compose(&id, &inner).unwrap();
        for (a, b) in out.derivs().iter().zip(inner.derivs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_checks_base_point() {
        let inner = lift("x^2", 2.0, 2);
        let outer = lift("x", 3.0, 2);
        assert!(matches!(jet_compose(&outer, &inner), Err(Error::BasePointMismatch { .. })));
        let outer = lift("x", 4.0, 1);
        assert!(matches!(jet_compose(&outer, &inner), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn halving_iterates() {
        let phi = parse("x/2").unwrap();
        let jets = iterate_jets(&phi, 1.0, 3, 1).unwrap();
        let firsts: Vec<f64> = jets.iter().map(|j| j.deriv(1)).collect();
        assert_eq!(firsts, vec![1.0, 0.5, 0.25, 0.125]);
        let jets = iterate_jets(&phi, 1.0, 30, 3).unwrap();
        for (n, j) in jets.iter().enumerate() {
            assert_eq!(j.deriv(1), 0.5f64.powi(n as i32));
            assert_eq!(j.deriv(2), 0.0);
            assert_eq!(j.deriv(3), 0.0);
        }
    }

    #[test]
    fn multiply_square() {
        let a = Jet::identity(2.0, 2);
        assert_eq!(jet_multiply(&a, &a).unwrap().derivs(), &[4.0, 4.0, 2.0]);
        let one = Jet::constant(2.0, 1.0, 2);
        assert_eq!(jet_multiply(&one, &a).unwrap(), a);
    }

    #[test]
    fn product_matches_lift() {
        let a = lift("sin(x)", 1.0, 5);
        let b = lift("exp(x)", 1.0, 5);
        let ab = jet_multiply(&a, &b).unwrap();
        let direct = lift("sin(x)*exp(x)", 1.0, 5);
        for (u, v) in ab.derivs().iter().zip(direct.derivs()) {
            assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn inverse_of_exp_is_log() {
        let j = lift("exp(x)", 0.5, 5);
        let inv = jet_inverse(&j).unwrap();
        let log = lift("log(x)", 0.5f64.exp(), 5);
        assert!((inv.base_point() - log.base_point()).abs() < 1e-15);
        for (u, v) in inv.derivs().iter().zip(log.derivs()) {
            assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()), "{inv:?} vs {log:?}");
        }
    }

    #[test]
    fn escape_names_the_step() {
        let phi = parse("x - 1").unwrap();
        let log_phi = parse("log(x)").unwrap();
        assert!(iterate_jets(&phi, 0.5, 5, 2).is_ok());
        // log(e^e) = e, log(e) = 1, log(1) = 0, log(0) fails at step 4
        let x = 1f64.exp().exp();
        match iterate_jets(&log_phi, x, 6, 1) {
            Err(Error::Escape { step, .. }) => assert_eq!(step, 4),
            other => panic!("expected escape, got {other:?}"),
        }
    }
}

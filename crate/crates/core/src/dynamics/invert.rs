use super::{CompactInterval, DomainInterval};
use crate::jets::{jet_inverse, Jet, SmoothFunction};
use crate::{Error, Result};

const MONOTONE_SAMPLES: usize = 33;
const MAX_ITERATIONS: usize = 400;

/// Common strict sign of `φ′` over `points`, or `None` if it vanishes or
/// changes sign somewhere.
pub fn derivative_sign<F: SmoothFunction + ?Sized>(phi: &F, points: &[f64]) -> Result<Option<f64>> {
    let mut sign = 0.0;
    for &x in points {
        let d = phi.jet(x, 1)?.deriv(1);
        if d == 0.0 || (sign != 0.0 && d.signum() != sign) {
            return Ok(None);
        }
        sign = d.signum();
    }
    Ok(Some(sign))
}

/// Safeguarded Newton iteration inside a sign-change bracket of `φ - y`.
/// Returns the last iterate once the step or bracket reaches rounding level.
fn solve_in_bracket<F: SmoothFunction + ?Sized>(phi: &F, y: f64, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
    let a_negative = fa < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITERATIONS {
        let jet = phi.jet(x, 1)?;
        let g = jet.value() - y;
        if g == 0.0 {
            return Ok(x);
        }
        if (g < 0.0) == a_negative {
            a = x;
        } else {
            b = x;
        }
        let newton = x - g / jet.deriv(1);
        let inside = newton.is_finite() && (newton - a) * (newton - b) < 0.0;
        let next = if inside { newton } else { 0.5 * (a + b) };
        let floor = 4.0 * f64::EPSILON * x.abs().max(1e-300);
        if (next - x).abs() <= floor || (b - a).abs() <= floor {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence { what: format!("inversion of y = {y}"), iterations: MAX_ITERATIONS })
}

/// Solves `φ(x) = y` on `bracket` for a strictly monotone `φ`.
///
/// Monotonicity is checked on sampled derivatives; `y` must lie between
/// the endpoint values.
pub fn invert_monotone<F: SmoothFunction + ?Sized>(phi: &F, y: f64, bracket: &CompactInterval, tol: f64) -> Result<f64> {
    let (a, b) = (bracket.a(), bracket.b());
    let samples = bracket.with_grid(MONOTONE_SAMPLES)?.grid();
    if derivative_sign(phi, &samples)?.is_none() {
        return Err(Error::NotMonotone { a, b });
    }
    let fa = phi.value(a)? - y;
    let fb = phi.value(b)? - y;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(Error::NoBracket { y, a, b });
    }
    let x = solve_in_bracket(phi, y, a, b, fa)?;
    let residual = (phi.value(x)? - y).abs();
    if residual > tol {
        return Err(Error::NoConvergence { what: format!("inversion of y = {y} to tolerance {tol}"), iterations: MAX_ITERATIONS });
    }
    Ok(x)
}

/// `φ^{-1}` of a diffeomorphism of `domain`, evaluated by bracketed root
/// finding; jets come from series reversion of `φ`'s jet.
///
/// Monotonicity is the caller's responsibility (checked once on grids
/// rather than on every call).
#[derive(Debug, Clone, Copy)]
pub struct InverseMap<'a, F: ?Sized> {
    phi: &'a F,
    domain: DomainInterval,
}

impl<'a, F: SmoothFunction + ?Sized> InverseMap<'a, F> {
    pub fn new(phi: &'a F, domain: DomainInterval) -> Self {
        Self { phi, domain }
    }

    fn bracket(&self, y: f64) -> Result<(f64, f64, f64)> {
        let (lo, hi) = (self.domain.lower(), self.domain.upper());
        let c = if self.domain.contains(y) {
            y
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo + 1.0
        } else {
            hi - 1.0
        };
        let mut last = (c, c);
        for k in 0..80 {
            let h = 2f64.powi(k);
            let a = if lo.is_finite() && c - h <= lo { lo + (c - lo) * 2f64.powi(-k) } else { c - h };
            let b = if hi.is_finite() && c + h >= hi { hi - (hi - c) * 2f64.powi(-k) } else { c + h };
            if a.abs() > 1e12 || b.abs() > 1e12 {
                break;
            }
            let (Ok(fa), Ok(fb)) = (self.phi.value(a), self.phi.value(b)) else { break };
            last = (a, b);
            let (fa, fb) = (fa - y, fb - y);
            if fa == 0.0 {
                return Ok((a, a, 0.0));
            }
            if fb == 0.0 {
                return Ok((b, b, 0.0));
            }
            if (fa < 0.0) != (fb < 0.0) {
                return Ok((a, b, fa));
            }
        }
        Err(Error::NoBracket { y, a: last.0, b: last.1 })
    }
}

impl<F: SmoothFunction + ?Sized> SmoothFunction for InverseMap<'_, F> {
    fn value(&self, y: f64) -> Result<f64> {
        let (a, b, fa) = self.bracket(y)?;
        if a == b {
            return Ok(a);
        }
        solve_in_bracket(self.phi, y, a, b, fa)
    }

    fn jet(&self, y: f64, order: usize) -> Result<Jet> {
        let x = self.value(y)?;
        let inverse = jet_inverse(&self.phi.jet(x, order)?)?;
        // Re-anchor at the requested point; the solve is accurate to rounding.
        Jet::new(y, inverse.derivs().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn k(a: f64, b: f64) -> CompactInterval {
        CompactInterval::new(a, b, 5).unwrap()
    }

    #[test]
    fn halving_inverse() {
        let x = invert_monotone(&parse("x/2").unwrap(), 1.0, &k(-10.0, 10.0), 1e-12).unwrap();
        assert!((x - 2.0).abs() < 1e-14);
    }

    #[test]
    fn involution_is_self_inverse() {
        let phi = parse("-3*x+sqrt(8*x^2+2)").unwrap();
        for y in [-4.0, -1.0, 0.0, 0.5, 2.0, 7.5] {
            let x = invert_monotone(&phi, y, &k(-100.0, 100.0), 1e-10).unwrap();
            let direct = phi.evaluate(y).unwrap();
            assert!((x - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{y}: {x} vs {direct}");
        }
    }

    #[test]
    fn unattained_value() {
        let err = invert_monotone(&parse("exp(x)").unwrap(), -1.0, &k(-5.0, 5.0), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
        let err = invert_monotone(&parse("x^2").unwrap(), 1.0, &k(-2.0, 2.0), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotMonotone { .. }));
    }

    #[test]
    fn round_trip() {
        let phi = parse("x/2 + sin(x)/4").unwrap();
        for x in [-3.0, -0.2, 0.0, 1.3, 4.0] {
            let y = phi.evaluate(x).unwrap();
            let back = invert_monotone(&phi, y, &k(-10.0, 10.0), 1e-12).unwrap();
            assert!((back - x).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_map_values_and_jets() {
        let phi = parse("x/2").unwrap();
        let inv = InverseMap::new(&phi, DomainInterval::real_line());
        assert_eq!(inv.value(3.0).unwrap(), 6.0);
        let j = inv.jet(3.0, 2).unwrap();
        assert_eq!(j.derivs(), &[6.0, 2.0, 0.0]);

        let exp = parse("exp(x)").unwrap();
        let inv = InverseMap::new(&exp, DomainInterval::real_line());
        let j = inv.jet(2.0, 3).unwrap();
        let ln2 = 2f64.ln();
        for (got, want) in j.derivs().iter().zip([ln2, 0.5, -0.25, 0.25]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(inv.value(-1.0), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn inverse_on_half_line() {
        let phi = parse("x^2").unwrap();
        let inv = InverseMap::new(&phi, DomainInterval::new(0.0, f64::INFINITY).unwrap());
        assert!((inv.value(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((inv.value(1e-6).unwrap() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn sign_of_derivative() {
        let pts = k(-2.0, 2.0).grid();
        assert_eq!(derivative_sign(&parse("-3*x+sqrt(8*x^2+2)").unwrap(), &pts).unwrap(), Some(-1.0));
        assert_eq!(derivative_sign(&parse("x^3").unwrap(), &pts).unwrap(), None);
    }
}

use super::CompactInterval;
use crate::expr::Expression;
use crate::jets::SmoothFunction;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;
const CERTIFICATE_POINTS: usize = 2001;

/// The decreasing involution `x ↦ y` defined implicitly by
/// `x + y = f(x - y)` for an even `f` with `|f′| ≤ a < 1`.
#[derive(Debug, Clone)]
pub struct EvenInvolution {
    f: Expression,
    lipschitz: f64,
    window: CompactInterval,
}

impl EvenInvolution {
    /// Checks evenness and the contraction bound on samples of `window`
    /// (taken symmetric about 0).
    pub fn certify(f: &Expression, window: &CompactInterval) -> Result<Self> {
        let r = window.magnitude();
        let samples = CompactInterval::new(-r, r, window.grid_size().max(CERTIFICATE_POINTS))?;
        let mut lipschitz: f64 = 0.0;
        for t in samples.grid() {
            let (left, right) = (f.evaluate(t)?, f.evaluate(-t)?);
            if (left - right).abs() > 1e-9 * (1.0 + left.abs()) {
                return Err(Error::NotEven { x: t });
            }
            lipschitz = lipschitz.max(f.jet(t, 1)?.deriv(1).abs());
        }
        if lipschitz >= 1.0 {
            return Err(Error::ContractionViolation { lipschitz });
        }
        Ok(Self { f: f.clone(), lipschitz, window: samples })
    }

    /// Sampled `sup |f′|` on the certificate window.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn window(&self) -> &CompactInterval {
        &self.window
    }

    /// `y` with `|x + y - f(x - y)| ≤ tol`.
    pub fn apply(&self, x: f64, tol: f64) -> Result<f64> {
        let f = &self.f;
        let mut y = f.evaluate(x)? - x;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let next = f.evaluate(x - y)? - x;
            let step = (next - y).abs();
            y = next;
            if step <= 0.01 * tol || step <= 4.0 * f64::EPSILON * (1.0 + y.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { what: format!("involution iteration at x = {x}"), iterations: MAX_ITERATIONS });
        }
        for _ in 0..5 {
            let jet = f.jet(x - y, 1)?;
            let residual = x + y - jet.value();
            if residual == 0.0 {
                break;
            }
            y -= residual / (1.0 + jet.deriv(1));
        }
        let residual = (x + y - f.evaluate(x - y)?).abs();
        if residual > tol {
            return Err(Error::NoConvergence { what: format!("involution residual {residual} at x = {x}"), iterations: MAX_ITERATIONS });
        }
        Ok(y)
    }
}

/// Solves `x + y = f(x - y)` after certifying `f` on a window wide enough
/// to contain `x - y` for the expected solution.
pub fn involution_from_even(f: &Expression, x: f64, tol: f64) -> Result<f64> {
    let r = 2.0 + 8.0 * x.abs();
    EvenInvolution::certify(f, &CompactInterval::new(-r, r, CERTIFICATE_POINTS)?)?.apply(x, tol)
}

/// `max |φ^p(x) - x|` over the grid of `k`.
pub fn periodic_defect<F: SmoothFunction + ?Sized>(phi: &F, k: &CompactInterval, period: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in k.grid() {
        let mut y = x;
        for _ in 0..period {
            y = phi.value(y)?;
        }
        worst = worst.max((y - x).abs());
    }
    Ok(worst)
}

/// `max |φ(φ(x)) - x|` over the grid of `k`.
pub fn involution_defect<F: SmoothFunction + ?Sized>(phi: &F, k: &CompactInterval) -> Result<f64> {
    periodic_defect(phi, k, 2)
}

use num_complex::Complex64;
use rayon::prelude::*;

use super::power::OrbitWalker;
use super::WeightedSymbol;
use crate::dynamics::{derivative_sign, CompactInterval, InverseMap};
use crate::expr::Expression;
use crate::jets::{jet_compose, jet_divide, jet_inverse, jet_lift, jet_multiply, Jet, SmoothFunction};
use crate::quadrature::integrate;
use crate::{Error, Result};

const QUADRATURE_TOL: f64 = 1e-8;
const SIGN_SAMPLES: usize = 33;

/// Test function: an expression on a declared compact support, treated as
/// zero outside the open support interval.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub expr: Expression,
    pub support: CompactInterval,
}

impl TestFunction {
    pub fn new(expr: Expression, support: CompactInterval) -> Self {
        Self { expr, support }
    }

    fn inside(&self, x: f64) -> bool {
        x > self.support.a() && x < self.support.b()
    }
}

#[derive(Debug, Clone)]
pub enum DistributionSample {
    /// `k`-th derivative of the point mass at `a`: `⟨δ_a^{(k)}, g⟩ = (-1)^k g^{(k)}(a)`.
    Dirac { a: f64, k: usize },
    /// Regular distribution with density `rho` supported on `support`.
    Density { rho: Expression, support: CompactInterval },
}

fn check_inputs(op: &WeightedSymbol, u: &DistributionSample, psi: &TestFunction) -> Result<()> {
    let x = op.domain();
    if psi.support.distance_to_boundary(x) <= 0.0 {
        return Err(Error::Precondition("test function support is not inside the domain".into()));
    }
    match u {
        DistributionSample::Dirac { a, .. } if !x.contains(*a) => {
            Err(Error::Precondition(format!("point mass at {a} is outside the domain")))
        }
        DistributionSample::Density { support, .. } if support.distance_to_boundary(x) <= 0.0 => {
            Err(Error::Precondition("density support is not inside the domain".into()))
        }
        _ => {
            let samples = psi.support.with_grid(SIGN_SAMPLES)?.grid();
            if derivative_sign(op.phi(), &samples)?.is_none() {
                return Err(Error::Precondition("symbol derivative vanishes or changes sign".into()));
            }
            Ok(())
        }
    }
}

/// `Φ^{-1}(y)` for `Φ = φ^m`, by `m` monotone inversions.
fn pull_back(op: &WeightedSymbol, y: f64, m: usize) -> Result<f64> {
    let inverse = InverseMap::new(op.phi(), *op.domain());
    let mut z = y;
    for step in 1..=m {
        z = inverse.value(z)?;
        if !op.domain().contains(z) {
            return Err(Error::Escape { step, value: Some(z) });
        }
    }
    Ok(z)
}

fn alpha_power(alpha: Complex64, m: usize) -> Complex64 {
    (0..m).fold(Complex64::new(1.0, 0.0), |acc, _| acc * alpha)
}

/// `(-1)^k` times the `k`-th derivative at `a` of
/// `(ψ · P_m / |(φ^m)′|) ∘ (φ^m)^{-1}`, without the scalar `α^m`.
fn dirac_pairing(op: &WeightedSymbol, a: f64, k: usize, m: usize, psi: &TestFunction) -> Result<f64> {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    if m == 0 {
        return Ok(if psi.inside(a) { sign * jet_lift(&psi.expr, a, k)?.deriv(k) } else { 0.0 });
    }
    let z = pull_back(op, a, m)?;
    if !psi.inside(z) {
        return Ok(0.0);
    }
    let mut walker = OrbitWalker::new(op, z, k + 1)?;
    for _ in 0..m {
        walker.advance()?;
    }
    let iterate = walker.iterate();
    let d = iterate.derivs();
    let orientation = d[1].signum();
    let abs_derivative = Jet::new(z, d[1..].iter().map(|v| orientation * v).collect())?;
    let product = walker.product().truncate(k);
    let transported = jet_divide(&jet_multiply(&jet_lift(&psi.expr, z, k)?, &product)?, &abs_derivative)?;
    let inverse = jet_inverse(&iterate.truncate(k))?;
    let g = jet_compose(&transported, &inverse)?;
    Ok(sign * g.deriv(k))
}

/// `∫ ρ(y) (ψ · P_m / |(φ^m)′|)((φ^m)^{-1}(y)) dy` over the part of the
/// density support covered by `φ^m(supp ψ)`, without the scalar `α^m`.
fn density_pairing(op: &WeightedSymbol, rho: &Expression, support: &CompactInterval, m: usize, psi: &TestFunction) -> Result<f64> {
    let (p, q) = (psi.support.a(), psi.support.b());
    let (lo, hi) = if m == 0 {
        (p, q)
    } else {
        let mut ends = [p, q];
        for e in ends.iter_mut() {
            let mut walker = OrbitWalker::new(op, *e, 0)?;
            for _ in 0..m {
                walker.advance()?;
            }
            *e = walker.iterate().value();
        }
        (ends[0].min(ends[1]), ends[0].max(ends[1]))
    };
    let (lo, hi) = (lo.max(support.a()), hi.min(support.b()));
    if lo >= hi {
        return Ok(0.0);
    }
    let integrand = |y: f64| -> Result<f64> {
        let r = rho.evaluate(y)?;
        if m == 0 {
            return Ok(r * psi.expr.evaluate(y)?);
        }
        let z = pull_back(op, y, m)?;
        let mut walker = OrbitWalker::new(op, z, 1)?;
        for _ in 0..m {
            walker.advance()?;
        }
        let jacobian = walker.iterate().deriv(1).abs();
        Ok(r * psi.expr.evaluate(z)? * walker.product().value() / jacobian)
    };
    integrate(integrand, lo, hi, QUADRATURE_TOL)
}

/// `⟨C^m u, ψ⟩ = ⟨u, (ψ · ∏_{l<m} w(φ^l) / |(φ^m)′|) ∘ (φ^m)^{-1}⟩`.
pub fn distribution_pairing(op: &WeightedSymbol, u: &DistributionSample, m: usize, psi: &TestFunction) -> Result<Complex64> {
    check_inputs(op, u, psi)?;
    let real = match u {
        DistributionSample::Dirac { a, k } => dirac_pairing(op, *a, *k, m, psi)?,
        DistributionSample::Density { rho, support } => density_pairing(op, rho, support, m, psi)?,
    };
    Ok(alpha_power(op.alpha(), m) * real)
}

/// `(1/n) Σ_{m=1}^{n} ⟨C^m u, ψ⟩`.
pub fn cesaro_pairing(op: &WeightedSymbol, u: &DistributionSample, n: usize, psi: &TestFunction) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Precondition("Cesàro pairing needs n >= 1".into()));
    }
    let terms: Vec<Complex64> = (1..=n)
        .into_par_iter()
        .map(|m| distribution_pairing(op, u, m, psi))
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum::<Complex64>() / n as f64)
}

use num_complex::Complex64;
use rayon::prelude::*;

use super::{SeminormRequest, WeightedSymbol};
use crate::combinatorics::{binomial_f64, BellTable};
use crate::expr::Expression;
use crate::jets::{jet_compose, jet_lift, jet_multiply, Jet, SmoothFunction, DEFAULT_ORDER_CAP};
use crate::{Error, Result};

/// Walks the orbit of `x`, keeping the jets of `φ^m` and of the real weight
/// product `P_m = ∏_{l<m} weight(φ^l)` at `x`.
pub(crate) struct OrbitWalker<'a> {
    op: &'a WeightedSymbol,
    iterate: Jet,
    product: Jet,
    step: usize,
}

impl<'a> OrbitWalker<'a> {
    pub(crate) fn new(op: &'a WeightedSymbol, x: f64, order: usize) -> Result<Self> {
        if order > DEFAULT_ORDER_CAP + 1 {
            return Err(Error::OrderCap { order, cap: DEFAULT_ORDER_CAP });
        }
        if !op.domain().contains(x) {
            return Err(Error::Escape { step: 0, value: Some(x) });
        }
        Ok(Self { op, iterate: Jet::identity(x, order), product: Jet::constant(x, 1.0, order), step: 0 })
    }

    pub(crate) fn advance(&mut self) -> Result<()> {
        let order = self.iterate.order();
        let point = self.iterate.value();
        let w = jet_compose(&self.op.weight().jet(point, order)?, &self.iterate)?;
        self.product = jet_multiply(&self.product, &w)?;
        let step = self.step + 1;
        let next = self
            .op
            .phi()
            .jet(point, order)
            .and_then(|j| jet_compose(&j, &self.iterate))
            .map_err(|e| match e {
                Error::NonFinite(_) => e,
                _ => Error::Escape { step, value: None },
            })?;
        if !self.op.domain().contains(next.value()) {
            return Err(Error::Escape { step, value: Some(next.value()) });
        }
        self.iterate = next;
        self.step = step;
        Ok(())
    }

    pub(crate) fn step(&self) -> usize {
        self.step
    }

    /// Jet of `φ^m` at `x`.
    pub(crate) fn iterate(&self) -> &Jet {
        &self.iterate
    }

    /// Jet of the real product `∏_{l<m} weight(φ^l)` at `x`.
    pub(crate) fn product(&self) -> &Jet {
        &self.product
    }

    /// `B_{r,j}((φ^m)′, …)` for `r ≤ max_r`.
    pub(crate) fn bell(&self, max_r: usize) -> Result<BellTable> {
        BellTable::new(max_r, &self.iterate.derivs()[1..])
    }
}

/// `Σ_{0≤j≤r≤s} C(s,r) P^{(s-r)} f^{(j)}(φⁿ) B_{r,j}` without the scalar `αⁿ`.
fn display_sum(s: usize, product: &[f64], f_derivs: &[Complex64], bell: &BellTable) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for r in 0..=s {
        let mut inner = Complex64::new(0.0, 0.0);
        for (j, fj) in f_derivs.iter().enumerate().take(r + 1) {
            inner += fj * bell.get(r, j);
        }
        total += inner * (binomial_f64(s, r) * product[s - r]);
    }
    total
}

fn alpha_power(alpha: Complex64, n: usize) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, _| acc * alpha)
}

fn real_jet(f: &Expression) -> impl Fn(f64, usize) -> Result<Vec<Complex64>> + Sync + '_ {
    move |x, order| Ok(jet_lift(f, x, order)?.derivs().iter().map(|&v| Complex64::new(v, 0.0)).collect())
}

/// All orders `0..=s` of `(C^n g)^{(·)}(x)` for the current walker position.
fn current_jet<G>(walker: &OrbitWalker<'_>, g: &G, s: usize, alpha_n: Complex64) -> Result<Vec<Complex64>>
where
    G: Fn(f64, usize) -> Result<Vec<Complex64>>,
{
    let f_derivs = g(walker.iterate().value(), s)?;
    if f_derivs.len() != s + 1 {
        return Err(Error::LengthMismatch { expected: s + 1, found: f_derivs.len() });
    }
    let bell = walker.bell(s)?;
    let product = walker.product().derivs();
    Ok((0..=s).map(|q| alpha_n * display_sum(q, product, &f_derivs, &bell)).collect())
}

/// `(C^n g)^{(q)}(x)` for `q = 0..=s`, where `g(y, s)` returns the raw
/// derivatives `g^{(0..=s)}(y)`.
pub fn power_jet_with<G>(op: &WeightedSymbol, g: &G, n: usize, s: usize, x: f64) -> Result<Vec<Complex64>>
where
    G: Fn(f64, usize) -> Result<Vec<Complex64>>,
{
    let mut walker = OrbitWalker::new(op, x, s)?;
    for _ in 0..n {
        walker.advance()?;
    }
    current_jet(&walker, g, s, alpha_power(op.alpha(), n))
}

/// `(C^n f)^{(q)}(x)` for `q = 0..=s`.
pub fn power_jet(op: &WeightedSymbol, f: &Expression, n: usize, s: usize, x: f64) -> Result<Vec<Complex64>> {
    power_jet_with(op, &real_jet(f), n, s, x)
}

/// `(C^n f)^{(s)}(x)` from the Leibniz/Faà di Bruno expansion along the
/// orbit of `x`.
pub fn apply_power_derivative(op: &WeightedSymbol, f: &Expression, n: usize, s: usize, x: f64) -> Result<Complex64> {
    Ok(power_jet(op, f, n, s, x)?[s])
}

/// `(C^m g)^{(0..=s)}(x)` for `m = 0..=n_max`, walking the orbit once.
pub fn power_sequence<G>(op: &WeightedSymbol, g: &G, n_max: usize, s: usize, x: f64) -> Result<Vec<Vec<Complex64>>>
where
    G: Fn(f64, usize) -> Result<Vec<Complex64>>,
{
    let mut walker = OrbitWalker::new(op, x, s)?;
    let mut alpha_n = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(current_jet(&walker, g, s, alpha_n)?);
    for _ in 0..n_max {
        walker.advance()?;
        alpha_n *= op.alpha();
        out.push(current_jet(&walker, g, s, alpha_n)?);
    }
    Ok(out)
}

/// `(C^{[n]} f)^{(s)}(x)` for `n = 1..=n_max` (entry `n - 1`), from running
/// sums of the powers.
pub fn cesaro_means_at(op: &WeightedSymbol, f: &Expression, n_max: usize, s: usize, x: f64) -> Result<Vec<Complex64>> {
    let powers = power_sequence(op, &real_jet(f), n_max, s, x)?;
    let mut sum = Complex64::new(0.0, 0.0);
    Ok(powers
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, p)| {
            sum += p[s];
            sum / n as f64
        })
        .collect())
}

/// Grid values of `(C^{[n]} f)^{(s)}` on `K`.
pub fn cesaro_mean(op: &WeightedSymbol, f: &Expression, n: usize, req: &SeminormRequest) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::Precondition("Cesàro mean needs n >= 1".into()));
    }
    req.k
        .grid()
        .into_par_iter()
        .map(|x| Ok(cesaro_means_at(op, f, n, req.s, x)?[n - 1]))
        .collect()
}

/// `‖f‖_{s,K} = max over the grid of K and r ≤ s of |f^{(r)}|`.
pub fn seminorm(f: &Expression, req: &SeminormRequest) -> Result<f64> {
    let maxima: Vec<f64> = req
        .k
        .grid()
        .into_par_iter()
        .map(|x| Ok(jet_lift(f, x, req.s)?.derivs().iter().fold(0.0f64, |m, v| m.max(v.abs()))))
        .collect::<Result<_>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CompactInterval;
    use crate::expr::parse;

    fn op(phi: &str) -> WeightedSymbol {
        WeightedSymbol::composition(parse(phi).unwrap())
    }

    #[test]
    fn seminorm_examples() {
        let k = CompactInterval::new(-2.0, 3.0, 11).unwrap();
        assert_eq!(seminorm(&parse("x").unwrap(), &SeminormRequest::new(1, k).unwrap()).unwrap(), 3.0);
        let k = CompactInterval::new(0.0, std::f64::consts::FRAC_PI_2, 11).unwrap();
        assert_eq!(seminorm(&parse("sin(x)").unwrap(), &SeminormRequest::new(0, k).unwrap()).unwrap(), 1.0);
        let k = CompactInterval::new(0.0, 1.0, 11).unwrap();
        let e = seminorm(&parse("exp(x)").unwrap(), &SeminormRequest::new(2, k).unwrap()).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn halving_square() {
        let v = apply_power_derivative(&op("x/2"), &parse("x^2").unwrap(), 2, 1, 1.0).unwrap();
        assert_eq!(v, Complex64::new(0.125, 0.0));
    }

    #[test]
    fn order_zero_is_weighted_orbit_value() {
        let o = op("x/2").with_weight(parse("1 + x^2").unwrap(), Complex64::new(0.0, 2.0));
        let f = parse("cos(x)").unwrap();
        let x = 0.7;
        let v = apply_power_derivative(&o, &f, 3, 0, x).unwrap();
        let w = |t: f64| 1.0 + t * t;
        let expected = Complex64::new(0.0, 2.0).powu(3) * (w(x) * w(x / 2.0) * w(x / 4.0)) * (x / 8.0).cos();
        assert!((v - expected).norm() < 1e-14 * expected.norm());
    }

    #[test]
    fn unweighted_matches_composed_jet() {
        let phi = parse("-3*x+sqrt(8*x^2+2)").unwrap();
        let f = parse("exp(x/3)*sin(x)").unwrap();
        let o = WeightedSymbol::composition(phi.clone());
        for n in [1, 2, 5] {
            let x = 0.3;
            let mut composed = f.clone();
            for _ in 0..n {
                composed = composed.compose(&phi);
            }
            let direct = jet_lift(&composed, x, 3).unwrap();
            let via = power_jet(&o, &f, n, 3, x).unwrap();
            for s in 0..=3 {
                let d = direct.deriv(s);
                assert!((via[s].re - d).abs() <= 1e-9 * (1.0 + d.abs()), "n={n} s={s}");
                assert_eq!(via[s].im, 0.0);
            }
        }
    }

    #[test]
    fn cesaro_of_reflection_is_symmetrization() {
        let f = parse("x^3 + exp(x)").unwrap();
        let k = CompactInterval::new(-1.0, 1.0, 9).unwrap();
        let req = SeminormRequest::new(0, k).unwrap();
        let vals = cesaro_mean(&op("-x"), &f, 10, &req).unwrap();
        for (x, v) in k.grid().into_iter().zip(vals) {
            let expected = 0.5 * (f.evaluate(x).unwrap() + f.evaluate(-x).unwrap());
            assert!((v.re - expected).abs() < 1e-14);
        }
        let same = cesaro_mean(&op("x"), &f, 7, &req).unwrap();
        for (x, v) in k.grid().into_iter().zip(same) {
            assert!((v.re - f.evaluate(x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn escape_is_reported() {
        let o = op("x - 1").with_domain(crate::dynamics::DomainInterval::new(0.0, 10.0).unwrap());
        let err = apply_power_derivative(&o, &parse("x").unwrap(), 5, 0, 2.5).unwrap_err();
        assert_eq!(err, Error::Escape { step: 3, value: Some(-0.5) });
    }
}

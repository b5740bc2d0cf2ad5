use rayon::prelude::*;

use super::power::{power_sequence, OrbitWalker};
use super::{SeminormRequest, WeightedSymbol};
use crate::combinatorics::binomial_f64;
use crate::dynamics::CompactInterval;
use crate::expr::Expression;
use crate::jets::jet_lift;
use crate::{Error, Result};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Vanishing,
    Bounded,
    Diverging,
    Inconclusive,
}

impl Trend {
    pub fn label(&self) -> &'static str {
        match self {
            Trend::Vanishing => "vanishing",
            Trend::Bounded => "bounded",
            Trend::Diverging => "diverging",
            Trend::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `(1/n) ‖Cⁿ f‖_{s,K}` for a fixed `f`.
    PowerVanishing,
    /// `(1/n) ‖Σ_{r=h}^{s} P^{(s-r)} B_{r,h,n}‖_{0,K}`.
    Vanishing,
    /// Summands `‖Σ_{r=h}^{s} C(s,r) P^{(s-r)} B_{r,h,n}‖_{0,K}` whose Cesàro
    /// averages must stay bounded.
    CesaroBound,
}

impl ConditionKind {
    pub fn label(&self) -> &'static str {
        match self {
            ConditionKind::PowerVanishing => "power-vanishing",
            ConditionKind::Vanishing => "vanishing",
            ConditionKind::CesaroBound => "cesaro-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionTrace {
    pub kind: ConditionKind,
    pub s: usize,
    pub h: usize,
    pub k: CompactInterval,
    /// Entry `n - 1` belongs to power `n`.
    pub values: Vec<f64>,
    pub trend: Trend,
    /// Running supremum of the averages `(1/m) Σ_{n≤m} values[n-1]`.
    pub cesaro_sup: Vec<f64>,
}

fn running_cesaro_sup(values: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    let mut sup = 0.0f64;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            sum += v;
            let avg = sum / (i + 1) as f64;
            sup = if avg.is_nan() || sup.is_nan() { f64::NAN } else { sup.max(avg) };
            sup
        })
        .collect()
}

fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Classifies `a_1, …, a_N` (entry `n - 1` is `a_n`).
///
/// * any non-finite value, or a least-squares slope of `ln a_n` against `n`
///   above 0.01 over the last half: diverging;
/// * all zero, or `a_N ≤ 1e-6 · max a` with a non-increasing last quarter,
///   or the suffix-maximum envelope decaying at least like `n^{-1/2}` over
///   the last half (log-log slope ≤ -0.5): vanishing;
/// * max over the last half ≤ 1.05 · max over the first half: bounded;
/// * otherwise inconclusive.
pub fn classify_sequence(values: &[f64]) -> Trend {
    if values.is_empty() {
        return Trend::Inconclusive;
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Trend::Diverging;
    }
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Trend::Vanishing;
    }
    let len = values.len();
    let start = len - len / 2;
    let tail: Vec<(f64, f64)> = (start..len)
        .filter(|&i| values[i] > 0.0)
        .map(|i| ((i + 1) as f64, values[i].ln()))
        .collect();
    if ols_slope(&tail).is_some_and(|m| m > 0.01) {
        return Trend::Diverging;
    }

    let last = values[len - 1];
    let quarter = &values[len - len.div_ceil(4)..];
    if last <= 1e-6 * max && quarter.windows(2).all(|w| w[1] <= w[0]) {
        return Trend::Vanishing;
    }
    let mut envelope = values.to_vec();
    for i in (0..len.saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let env: Vec<(f64, f64)> = (start..len)
        .filter(|&i| envelope[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), envelope[i].ln()))
        .collect();
    if ols_slope(&env).is_some_and(|m| m <= -0.5) {
        return Trend::Vanishing;
    }

    let first_max = values[..start.max(1)].iter().cloned().fold(0.0, f64::max);
    let last_max = values[start..].iter().cloned().fold(0.0, f64::max);
    if last_max <= 1.05 * first_max {
        return Trend::Bounded;
    }
    Trend::Inconclusive
}

/// Classifies a running supremum `S_1 ≤ … ≤ S_M` of Cesàro averages.
///
/// Diverging if non-finite or if, over the last half, `ln S` grows faster
/// than `m^{1/2}` in log-log terms or with slope above 0.01 against `m`;
/// bounded if `S_M` exceeds `S_{⌈M/2⌉}` by at most 2%; else inconclusive.
pub fn classify_cesaro_sup(sup: &[f64]) -> Trend {
    if sup.is_empty() {
        return Trend::Inconclusive;
    }
    if sup.iter().any(|v| !v.is_finite()) {
        return Trend::Diverging;
    }
    let len = sup.len();
    let last = sup[len - 1];
    if last == 0.0 {
        return Trend::Bounded;
    }
    let start = len - len / 2;
    let positive: Vec<usize> = (start..len).filter(|&i| sup[i] > 0.0).collect();
    let loglog: Vec<(f64, f64)> = positive.iter().map(|&i| (((i + 1) as f64).ln(), sup[i].ln())).collect();
    let semilog: Vec<(f64, f64)> = positive.iter().map(|&i| ((i + 1) as f64, sup[i].ln())).collect();
    if ols_slope(&loglog).is_some_and(|m| m > 0.5) || ols_slope(&semilog).is_some_and(|m| m > 0.01) {
        return Trend::Diverging;
    }
    let mid = sup[len.div_ceil(2) - 1];
    if (last - mid) / last <= 0.02 {
        return Trend::Bounded;
    }
    Trend::Inconclusive
}

/// Per power `n = 1..=steps` and per `(s, h)` pair: the grid maxima of the
/// vanishing-condition sum and of the Cesàro-condition summand (both with
/// the factor `|α|ⁿ`, without `1/n`).
struct Sweep {
    pairs: Vec<(usize, usize)>,
    vanishing: Vec<Vec<f64>>,
    cesaro: Vec<Vec<f64>>,
}

fn pairs_up_to(s_max: usize) -> Vec<(usize, usize)> {
    (0..=s_max).flat_map(|s| (0..=s).map(move |h| (s, h))).collect()
}

fn point_sweep(op: &WeightedSymbol, x: f64, pairs: &[(usize, usize)], s_max: usize, steps: usize, remark: Option<f64>) -> Result<Vec<Vec<(f64, f64)>>> {
    let modulus = op.alpha().norm();
    let mut walker = OrbitWalker::new(op, x, s_max)?;
    let mut scale = 1.0;
    let mut rows = Vec::with_capacity(steps);
    for _ in 0..steps {
        match walker.advance() {
            Ok(()) => {}
            Err(Error::NonFinite(_)) => {
                rows.resize(steps, vec![(f64::INFINITY, f64::INFINITY); pairs.len()]);
                return Ok(rows);
            }
            Err(e) => return Err(e),
        }
        scale *= modulus;
        let bell = walker.bell(s_max)?;
        let p = walker.product().derivs();
        let row = pairs
            .iter()
            .map(|&(s, h)| {
                let mut plain = 0.0;
                let mut weighted = 0.0;
                for r in h..=s {
                    let term = p[s - r] * bell.get(r, h);
                    plain += term;
                    weighted += binomial_f64(s, r) * term;
                }
                let plain = match remark {
                    Some(c) => (modulus * c.abs()).powi(walker.step() as i32) * bell.get(s, h).abs(),
                    None => scale * plain.abs(),
                };
                (plain, scale * weighted.abs())
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

fn sweep(op: &WeightedSymbol, k: &CompactInterval, s_max: usize, steps: usize, use_remark: bool) -> Result<Sweep> {
    let pairs = pairs_up_to(s_max);
    let remark = if use_remark { op.weight().as_constant() } else { None };
    let per_point: Vec<Vec<Vec<(f64, f64)>>> = k
        .grid()
        .into_par_iter()
        .map(|x| point_sweep(op, x, &pairs, s_max, steps, remark))
        .collect::<Result<_>>()?;
    let nan_max = |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::INFINITY } else { a.max(b) };
    let mut vanishing = vec![vec![0.0; steps]; pairs.len()];
    let mut cesaro = vec![vec![0.0; steps]; pairs.len()];
    for rows in &per_point {
        for (n, row) in rows.iter().enumerate() {
            for (i, &(a, b)) in row.iter().enumerate() {
                vanishing[i][n] = nan_max(vanishing[i][n], a);
                cesaro[i][n] = nan_max(cesaro[i][n], b);
            }
        }
    }
    Ok(Sweep { pairs, vanishing, cesaro })
}

fn vanishing_trace(s: usize, h: usize, k: &CompactInterval, sums: &[f64], n: usize) -> ConditionTrace {
    let values: Vec<f64> = sums[..n].iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
    let cesaro_sup = running_cesaro_sup(&values);
    ConditionTrace { kind: ConditionKind::Vanishing, s, h, k: *k, trend: classify_sequence(&values), values, cesaro_sup }
}

fn cesaro_trace(s: usize, h: usize, k: &CompactInterval, summands: &[f64], m: usize) -> ConditionTrace {
    let values = summands[..m].to_vec();
    let cesaro_sup = running_cesaro_sup(&values);
    ConditionTrace { kind: ConditionKind::CesaroBound, s, h, k: *k, trend: classify_cesaro_sup(&cesaro_sup), values, cesaro_sup }
}

/// Vanishing and Cesàro-bound traces for every `s ≤ s_max`, `h ≤ s`, in
/// that order, from one orbit walk per grid point.
pub fn condition_traces(op: &WeightedSymbol, k: &CompactInterval, s_max: usize, n: usize, m: usize) -> Result<Vec<(ConditionTrace, ConditionTrace)>> {
    SeminormRequest::new(s_max, *k)?;
    let sw = sweep(op, k, s_max, n.max(m), true)?;
    Ok(sw
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &(s, h))| (vanishing_trace(s, h, k, &sw.vanishing[i], n), cesaro_trace(s, h, k, &sw.cesaro[i], m)))
        .collect())
}

fn check_h(req: &SeminormRequest, h: usize) -> Result<()> {
    if h > req.s {
        return Err(Error::IndexContract(format!("h = {h} exceeds s = {}", req.s)));
    }
    Ok(())
}

fn pair_index(s: usize, h: usize) -> usize {
    s * (s + 1) / 2 + h
}

pub(crate) fn vanishing_condition_path(op: &WeightedSymbol, req: &SeminormRequest, h: usize, n: usize, use_remark: bool) -> Result<ConditionTrace> {
    check_h(req, h)?;
    let sw = sweep(op, &req.k, req.s, n, use_remark)?;
    Ok(vanishing_trace(req.s, h, &req.k, &sw.vanishing[pair_index(req.s, h)], n))
}

/// `a_n = (1/n) ‖Σ_{r=h}^{s} P_n^{(s-r)} B_{r,h,n}‖_{0,K}` for `n = 1..=N`,
/// with `P_n` the weight product along the orbit. A constant weight `c`
/// uses the reduced form `(|c|ⁿ/n) ‖B_{s,h,n}‖_{0,K}`.
pub fn check_vanishing_condition(op: &WeightedSymbol, req: &SeminormRequest, h: usize, n: usize) -> Result<ConditionTrace> {
    vanishing_condition_path(op, req, h, n, true)
}

/// Summands `‖Σ_{r=h}^{s} C(s,r) P_n^{(s-r)} B_{r,h,n}‖_{0,K}` for
/// `n = 1..=M` and the running supremum of their Cesàro averages.
pub fn check_cesaro_bound_condition(op: &WeightedSymbol, req: &SeminormRequest, h: usize, m: usize) -> Result<ConditionTrace> {
    check_h(req, h)?;
    let sw = sweep(op, &req.k, req.s, m, false)?;
    Ok(cesaro_trace(req.s, h, &req.k, &sw.cesaro[pair_index(req.s, h)], m))
}

/// `a_n = (1/n) ‖Cⁿ f‖_{s,K}` for `n = 1..=N`.
pub fn vanishing_power_check(op: &WeightedSymbol, f: &Expression, req: &SeminormRequest, n: usize) -> Result<ConditionTrace> {
    let g = |x: f64, order: usize| -> Result<Vec<Complex64>> {
        Ok(jet_lift(f, x, order)?.derivs().iter().map(|&v| Complex64::new(v, 0.0)).collect())
    };
    let per_point: Vec<Vec<f64>> = req
        .k
        .grid()
        .into_par_iter()
        .map(|x| {
            let seq = power_sequence(op, &g, n, req.s, x)?;
            Ok(seq.iter().skip(1).map(|jet| jet.iter().fold(0.0f64, |m, v| m.max(v.norm()))).collect())
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0f64; n];
    for row in &per_point {
        for (i, v) in row.iter().enumerate() {
            values[i] = if v.is_nan() { f64::INFINITY } else { values[i].max(*v) };
        }
    }
    for (i, v) in values.iter_mut().enumerate() {
        *v /= (i + 1) as f64;
    }
    let cesaro_sup = running_cesaro_sup(&values);
    Ok(ConditionTrace {
        kind: ConditionKind::PowerVanishing,
        s: req.s,
        h: 0,
        k: req.k,
        trend: classify_sequence(&values),
        values,
        cesaro_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn k() -> CompactInterval {
        CompactInterval::new(-1.0, 1.0, 21).unwrap()
    }

    fn halving(alpha: f64) -> WeightedSymbol {
        WeightedSymbol::composition(parse("x/2").unwrap()).with_weight(Expression::constant(1.0), Complex64::new(alpha, 0.0))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn power_checks() {
        let req0 = SeminormRequest::new(0, k()).unwrap();
        let t = vanishing_power_check(&halving(2.0), &Expression::constant(1.0), &req0, 60).unwrap();
        for (i, v) in t.values.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!(rel(*v, 2f64.powf(n) / n) < 1e-14);
        }
        assert_eq!(t.trend, Trend::Diverging);

        let t = vanishing_power_check(&halving(1.0), &parse("x").unwrap(), &req0, 60).unwrap();
        for (i, v) in t.values.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!(rel(*v, 2f64.powf(-n) / n) < 1e-14);
        }
        assert_eq!(t.trend, Trend::Vanishing);

        let inv = WeightedSymbol::composition(parse("-3*x+sqrt(8*x^2+2)").unwrap())
            .with_weight(Expression::constant(1.0), Complex64::new(0.6, 0.8));
        let t = vanishing_power_check(&inv, &parse("sin(x)").unwrap(), &SeminormRequest::new(1, k()).unwrap(), 200).unwrap();
        assert_eq!(t.trend, Trend::Vanishing);
    }

    #[test]
    fn halving_vanishing_condition_closed_forms() {
        let op = halving(1.0);
        let t = check_vanishing_condition(&op, &SeminormRequest::new(1, k()).unwrap(), 1, 200).unwrap();
        for (i, v) in t.values.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!(rel(*v, 2f64.powf(-n) / n) < 1e-14);
        }
        assert_eq!(t.trend, Trend::Vanishing);
        let t = check_vanishing_condition(&op, &SeminormRequest::new(0, k()).unwrap(), 0, 200).unwrap();
        for (i, v) in t.values.iter().enumerate() {
            assert!(rel(*v, 1.0 / (i + 1) as f64) < 1e-15);
        }
        assert_eq!(t.trend, Trend::Vanishing);
    }

    #[test]
    fn reflection_conditions_vanish() {
        let op = WeightedSymbol::composition(parse("-x+1").unwrap());
        for (a, b) in condition_traces(&op, &k(), 3, 200, 200).unwrap() {
            assert_eq!(a.trend, Trend::Vanishing, "s={} h={}", a.s, a.h);
            assert_eq!(b.trend, Trend::Bounded, "s={} h={}", b.s, b.h);
        }
    }

    #[test]
    fn cesaro_bound_closed_forms() {
        let t = check_cesaro_bound_condition(&halving(2.0), &SeminormRequest::new(0, k()).unwrap(), 0, 100).unwrap();
        let m = 100.0;
        assert!(rel(t.cesaro_sup[99], (2f64.powf(m + 1.0) - 2.0) / m) < 1e-12);
        assert_eq!(t.trend, Trend::Diverging);
        let t = check_cesaro_bound_condition(&halving(1.0), &SeminormRequest::new(1, k()).unwrap(), 1, 200).unwrap();
        assert!(t.cesaro_sup.iter().all(|v| *v <= 1.0));
        assert_eq!(t.trend, Trend::Bounded);
    }

    #[test]
    fn constant_weight_paths_agree() {
        let phi = parse("x/2 + sin(x)/4").unwrap();
        let op = WeightedSymbol::composition(phi).with_weight(Expression::constant(1.5), Complex64::new(0.0, 0.5));
        for s in 0..=3 {
            for h in 0..=s {
                let req = SeminormRequest::new(s, k()).unwrap();
                let a = vanishing_condition_path(&op, &req, h, 40, true).unwrap();
                let b = vanishing_condition_path(&op, &req, h, 40, false).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    assert!((x - y).abs() <= 1e-10 * x.abs().max(y.abs()) + 1e-300, "s={s} h={h}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn trend_rules() {
        assert_eq!(classify_sequence(&[0.0; 10]), Trend::Vanishing);
        let growing: Vec<f64> = (1..=50).map(|n| 1.1f64.powi(n)).collect();
        assert_eq!(classify_sequence(&growing), Trend::Diverging);
        let flat = vec![3.0; 50];
        assert_eq!(classify_sequence(&flat), Trend::Bounded);
        let slow: Vec<f64> = (1..=200).map(|n| (n as f64).powf(-0.2)).collect();
        assert_eq!(classify_sequence(&slow), Trend::Bounded);
        let creeping: Vec<f64> = (1..=200).map(|n| ((n + 1) as f64).ln()).collect();
        assert_eq!(classify_sequence(&creeping), Trend::Inconclusive);
        assert_eq!(classify_sequence(&[1.0, f64::INFINITY]), Trend::Diverging);

        let sup: Vec<f64> = (1..=200).map(|m| (m as f64).ln() + 1.0).collect();
        assert_eq!(classify_cesaro_sup(&sup), Trend::Inconclusive);
        let lin: Vec<f64> = (1..=200).map(|m| m as f64).collect();
        assert_eq!(classify_cesaro_sup(&lin), Trend::Diverging);
        assert_eq!(classify_cesaro_sup(&[0.5; 100]), Trend::Bounded);
    }
}

use rayon::prelude::*;

use super::{CompactInterval, DomainInterval};
use crate::jets::SmoothFunction;
use crate::{Error, Result};

/// `[x0, φ(x0), …, φⁿ(x0)]`, failing with [`Error::Escape`] at the first
/// iterate that leaves `domain` or cannot be evaluated.
pub fn orbit<F: SmoothFunction + ?Sized>(phi: &F, x0: f64, n: usize, domain: &DomainInterval) -> Result<Vec<f64>> {
    if !domain.contains(x0) {
        return Err(Error::Escape { step: 0, value: Some(x0) });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(x0);
    let mut x = x0;
    for step in 1..=n {
        x = phi.value(x).map_err(|_| Error::Escape { step, value: None })?;
        if !domain.contains(x) {
            return Err(Error::Escape { step, value: Some(x) });
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSettings {
    pub max_steps: usize,
    /// Minimal distance to ∂X; `None` selects [`CompactInterval::default_margin`].
    pub margin: Option<f64>,
    /// Magnitude beyond which an iterate counts as escaped.
    pub bound: f64,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        Self { max_steps: 200, margin: None, bound: 1e8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitVerdict {
    StableEvidence,
    EscapeDetected { step: usize },
    Inconclusive,
}

impl OrbitVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitVerdict::StableEvidence => "stable-evidence",
            OrbitVerdict::EscapeDetected { .. } => "escape-detected",
            OrbitVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Seed point whose orbit escaped, the step, and the offending value (if
/// the map could be evaluated at all).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeWitness {
    pub seed: f64,
    pub step: usize,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub seed_set: CompactInterval,
    pub margin: f64,
    pub bound: f64,
    /// `[min, max]` of the sampled `φⁿ(K)`, one entry per completed step
    /// starting at `n = 0`.
    pub hull_per_step: Vec<[f64; 2]>,
    /// Hull of `K ∪ φ(K) ∪ … ∪ φⁿ(K)`.
    pub running_union: Vec<[f64; 2]>,
    pub verdict: OrbitVerdict,
    pub witness: Option<EscapeWitness>,
    /// Enclosing compact set `L` when stable evidence was found.
    pub enclosure: Option<[f64; 2]>,
}

/// [`stable_orbits_with`] with default bound and the given step count and
/// margin.
pub fn stable_orbits<F: SmoothFunction + ?Sized>(
    phi: &F,
    k: &CompactInterval,
    domain: &DomainInterval,
    max_steps: usize,
    margin: f64,
) -> OrbitReport {
    let settings = OrbitSettings { max_steps, margin: Some(margin), ..OrbitSettings::default() };
    stable_orbits_with(phi, k, domain, &settings)
}

enum SeedRun {
    Done(Vec<f64>),
    Escaped(Vec<f64>, EscapeWitness),
}

fn run_seed<F: SmoothFunction + ?Sized>(phi: &F, seed: f64, domain: &DomainInterval, margin: f64, bound: f64, steps: usize) -> SeedRun {
    let ok = |v: f64| domain.contains_with_margin(v, margin) && v.abs() <= bound;
    let mut values = vec![seed];
    if !ok(seed) {
        return SeedRun::Escaped(Vec::new(), EscapeWitness { seed, step: 0, value: Some(seed) });
    }
    let mut x = seed;
    for step in 1..=steps {
        match phi.value(x) {
            Ok(v) if ok(v) => {
                values.push(v);
                x = v;
            }
            Ok(v) => return SeedRun::Escaped(values, EscapeWitness { seed, step, value: Some(v) }),
            Err(_) => return SeedRun::Escaped(values, EscapeWitness { seed, step, value: None }),
        }
    }
    SeedRun::Done(values)
}

/// Iterates every grid point of `K` and classifies the forward images.
///
/// Escape: some iterate comes within the margin of ∂X, exceeds the bound in
/// magnitude, or cannot be evaluated. Stable evidence: the running union is
/// unchanged (relative 1e-12) over the final `⌈N/2⌉` steps.
pub fn stable_orbits_with<F: SmoothFunction + ?Sized>(
    phi: &F,
    k: &CompactInterval,
    domain: &DomainInterval,
    settings: &OrbitSettings,
) -> OrbitReport {
    let margin = settings.margin.unwrap_or_else(|| k.default_margin(domain));
    let steps = settings.max_steps;
    let runs: Vec<SeedRun> = k
        .grid()
        .into_par_iter()
        .map(|seed| run_seed(phi, seed, domain, margin, settings.bound, steps))
        .collect();

    let mut witness: Option<EscapeWitness> = None;
    for run in &runs {
        if let SeedRun::Escaped(_, w) = run {
            if witness.is_none_or(|best| w.step < best.step) {
                witness = Some(*w);
            }
        }
    }
    let completed = witness.map_or(steps + 1, |w| w.step);

    let mut hull_per_step = Vec::with_capacity(completed);
    for n in 0..completed {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for run in &runs {
            let values = match run {
                SeedRun::Done(v) | SeedRun::Escaped(v, _) => v,
            };
            if let Some(&v) = values.get(n) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        hull_per_step.push([lo, hi]);
    }
    let mut running_union: Vec<[f64; 2]> = Vec::with_capacity(completed);
    for h in &hull_per_step {
        let next = match running_union.last() {
            Some(u) => [u[0].min(h[0]), u[1].max(h[1])],
            None => *h,
        };
        running_union.push(next);
    }

    let (verdict, enclosure) = if let Some(w) = witness {
        (OrbitVerdict::EscapeDetected { step: w.step }, None)
    } else {
        let last = running_union[steps];
        let earlier = running_union[steps - steps.div_ceil(2)];
        let scale = 1.0 + last[0].abs().max(last[1].abs());
        let flat = (last[0] - earlier[0]).abs() <= 1e-12 * scale && (last[1] - earlier[1]).abs() <= 1e-12 * scale;
        if flat {
            (OrbitVerdict::StableEvidence, Some(last))
        } else {
            (OrbitVerdict::Inconclusive, None)
        }
    };

    OrbitReport {
        seed_set: *k,
        margin,
        bound: settings.bound,
        hull_per_step,
        running_union,
        verdict,
        witness,
        enclosure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn simple_orbits() {
        let r = DomainInterval::real_line();
        assert_eq!(orbit(&parse("x/2").unwrap(), 1.0, 3, &r).unwrap(), vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(orbit(&parse("-x").unwrap(), 2.0, 4, &r).unwrap(), vec![2.0, -2.0, 2.0, -2.0, 2.0]);
        let grow = orbit(&parse("2*x").unwrap(), 1.0, 60, &r).unwrap();
        assert_eq!(grow[60], 2f64.powi(60));
    }

    #[test]
    fn orbit_escape_from_half_line() {
        let x = DomainInterval::new(0.0, f64::INFINITY).unwrap();
        let err = orbit(&parse("x - 1").unwrap(), 2.5, 5, &x).unwrap_err();
        assert_eq!(err, Error::Escape { step: 3, value: Some(-0.5) });
    }

    #[test]
    fn contraction_is_stable() {
        let k = CompactInterval::new(-1.0, 1.0, 21).unwrap();
        let rep = stable_orbits(&parse("x/2").unwrap(), &k, &DomainInterval::real_line(), 200, 1e-6);
        assert_eq!(rep.verdict, OrbitVerdict::StableEvidence);
        assert_eq!(rep.enclosure, Some([-1.0, 1.0]));
        assert_eq!(rep.hull_per_step.len(), 201);
        assert_eq!(rep.hull_per_step[10], [-(2f64.powi(-10)), 2f64.powi(-10)]);
    }

    #[test]
    fn doubling_escapes() {
        let k = CompactInterval::new(1.0, 2.0, 11).unwrap();
        let rep = stable_orbits(&parse("2*x").unwrap(), &k, &DomainInterval::real_line(), 200, 1e-6);
        // 2 · 2^26 > 1e8 first.
        assert_eq!(rep.verdict, OrbitVerdict::EscapeDetected { step: 26 });
        let w = rep.witness.unwrap();
        assert_eq!(w.step, 26);
        assert!(w.seed * 2f64.powi(26) > 1e8 && w.seed * 2f64.powi(25) <= 1e8);
        assert_eq!(rep.hull_per_step.len(), 26);
    }

    #[test]
    fn involution_union_is_k_and_its_image() {
        let phi = parse("-3*x+sqrt(8*x^2+2)").unwrap();
        let k = CompactInterval::new(0.0, 1.0, 11).unwrap();
        let rep = stable_orbits_with(&phi, &k, &DomainInterval::real_line(), &OrbitSettings::default());
        assert_eq!(rep.verdict, OrbitVerdict::StableEvidence);
        let l = rep.enclosure.unwrap();
        let image: Vec<f64> = k.grid().iter().map(|&x| phi.evaluate(x).unwrap()).collect();
        let lo = image.iter().cloned().fold(0.0, f64::min);
        let hi = image.iter().cloned().fold(1.0, f64::max);
        assert_eq!(l, [lo, hi]);
    }

    #[test]
    fn slow_drift_is_inconclusive() {
        let k = CompactInterval::new(1.0, 2.0, 5).unwrap();
        let rep = stable_orbits(&parse("x + 1/x").unwrap(), &k, &DomainInterval::real_line(), 50, 1e-6);
        assert_eq!(rep.verdict, OrbitVerdict::Inconclusive);
        assert!(rep.running_union.windows(2).all(|w| w[1][0] <= w[0][0] && w[1][1] >= w[0][1]));
    }

    #[test]
    fn boundary_margin_counts_as_escape() {
        let x = DomainInterval::new(0.0, 1.0).unwrap();
        let k = CompactInterval::new(0.4, 0.6, 5).unwrap();
        let rep = stable_orbits_with(&parse("x^2").unwrap(), &k, &x, &OrbitSettings::default());
        assert!(matches!(rep.verdict, OrbitVerdict::EscapeDetected { .. }));
    }
}

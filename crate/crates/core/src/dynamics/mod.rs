//! Interval maps: orbits, fixed points, stable-orbit detection, monotone
//! inversion and involutions built from even contractions.

mod fixed;
mod invert;
mod involution;
mod orbit;

pub use fixed::{fixed_points, FixedPoint, FixedPointSet};
pub use invert::{derivative_sign, invert_monotone, InverseMap};
pub use involution::{involution_defect, involution_from_even, periodic_defect, EvenInvolution};
pub use orbit::{orbit, stable_orbits, stable_orbits_with, EscapeWitness, OrbitReport, OrbitSettings, OrbitVerdict};

use crate::{Error, Result};

/// Open interval `(lower, upper)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainInterval {
    lower: f64,
    upper: f64,
}

impl DomainInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::Precondition(format!("invalid domain ({lower}, {upper})")));
        }
        Ok(Self { lower, upper })
    }

    pub fn real_line() -> Self {
        Self { lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_real_line(&self) -> bool {
        self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    /// Distance from `x` to the complement of the interval (infinite for ℝ).
    pub fn distance_to_boundary(&self, x: f64) -> f64 {
        (x - self.lower).min(self.upper - x)
    }

    /// Whether `x` stays at least `margin` away from the boundary.
    pub fn contains_with_margin(&self, x: f64, margin: f64) -> bool {
        self.contains(x) && self.distance_to_boundary(x) >= margin
    }

    /// Default compact seed set: `[-1, 1]` on ℝ, the middle half of a
    /// bounded interval, `[lo + 0.5, lo + 2]` / `[hi - 2, hi - 0.5]` on
    /// half-lines.
    pub fn default_seed(&self, grid_size: usize) -> CompactInterval {
        let (a, b) = match (self.lower.is_finite(), self.upper.is_finite()) {
            (false, false) => (-1.0, 1.0),
            (true, true) => {
                let w = self.upper - self.lower;
                (self.lower + 0.25 * w, self.upper - 0.25 * w)
            }
            (true, false) => (self.lower + 0.5, self.lower + 2.0),
            (false, true) => (self.upper - 2.0, self.upper - 0.5),
        };
        CompactInterval { a, b, grid_size: grid_size.max(2) }
    }
}

/// Compact interval `[a, b]` with a uniform sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactInterval {
    a: f64,
    b: f64,
    grid_size: usize,
}

impl CompactInterval {
    pub fn new(a: f64, b: f64, grid_size: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a > b {
            return Err(Error::Precondition(format!("invalid compact interval [{a}, {b}]")));
        }
        if grid_size < 2 {
            return Err(Error::Precondition(format!("grid size {grid_size} is below 2")));
        }
        Ok(Self { a, b, grid_size })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Largest absolute value in the interval.
    pub fn magnitude(&self) -> f64 {
        self.a.abs().max(self.b.abs())
    }

    /// Equally spaced points with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_size;
        let h = (self.b - self.a) / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { self.b } else { self.a + h * i as f64 })
            .collect()
    }

    pub fn with_grid(&self, grid_size: usize) -> Result<Self> {
        Self::new(self.a, self.b, grid_size)
    }

    /// Interval with the same center and half-width scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let c = self.center();
        let r = 0.5 * (self.b - self.a) * factor;
        Self { a: c - r, b: c + r, grid_size: self.grid_size }
    }

    pub fn distance_to_boundary(&self, domain: &DomainInterval) -> f64 {
        (self.a - domain.lower).min(domain.upper - self.b)
    }

    /// Escape margin: `1e-6 (1 + |K|)` on ℝ, else 1% of the distance to ∂X.
    pub fn default_margin(&self, domain: &DomainInterval) -> f64 {
        if domain.is_real_line() {
            1e-6 * (1.0 + self.magnitude())
        } else {
            0.01 * self.distance_to_boundary(domain)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_exact_endpoints() {
        let k = CompactInterval::new(-1.0, 0.3, 7).unwrap();
        let g = k.grid();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[6], 0.3);
    }

    #[test]
    fn margins() {
        let k = CompactInterval::new(1.0, 2.0, 3).unwrap();
        assert_eq!(k.default_margin(&DomainInterval::real_line()), 3e-6);
        let x = DomainInterval::new(0.0, 4.0).unwrap();
        assert!((k.default_margin(&x) - 0.01).abs() < 1e-15);
        assert!(DomainInterval::new(1.0, 1.0).is_err());
        assert!(CompactInterval::new(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn default_seeds_lie_inside() {
        for x in [
            DomainInterval::real_line(),
            DomainInterval::new(0.0, 1.0).unwrap(),
            DomainInterval::new(0.0, f64::INFINITY).unwrap(),
            DomainInterval::new(f64::NEG_INFINITY, 3.0).unwrap(),
        ] {
            let k = x.default_seed(5);
            assert!(k.distance_to_boundary(&x) > 0.0);
        }
    }
}

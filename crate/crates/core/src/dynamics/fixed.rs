use super::CompactInterval;
use crate::jets::SmoothFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub x: f64,
    /// `|φ(x) - x|`.
    pub residual: f64,
    /// No sign change of `φ(x) - x` across the point (touching root).
    pub tangential: bool,
    /// Isolating interval the point was refined in.
    pub bracket: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixedPointSet {
    pub points: Vec<FixedPoint>,
}

impl FixedPointSet {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Consecutive fixed points `x1 < x < x2`, if `x` is enclosed.
    pub fn enclosing(&self, x: f64) -> Option<(f64, f64)> {
        let i = self.points.iter().position(|p| p.x > x)?;
        (i > 0).then(|| (self.points[i - 1].x, self.points[i].x))
    }
}

fn displacement<F: SmoothFunction + ?Sized>(phi: &F, x: f64) -> Option<f64> {
    phi.value(x).ok().map(|v| v - x).filter(|g| g.is_finite())
}

fn bisect<F: SmoothFunction + ?Sized>(phi: &F, mut a: f64, mut b: f64, ga: f64, tol: f64) -> Option<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let g = displacement(phi, m)?;
        if g == 0.0 {
            return Some(m);
        }
        if (g < 0.0) == (ga < 0.0) {
            a = m;
        } else {
            b = m;
        }
        if (b - a) <= 4.0 * f64::EPSILON * m.abs().max(1e-300) && g.abs() < tol {
            break;
        }
    }
    Some(0.5 * (a + b))
}

/// Minimizes `|φ(x) - x|` on `[a, b]` by golden section, then polishes the
/// critical point of `φ(x) - x` with Newton steps on `φ′ - 1`.
fn touching_root<F: SmoothFunction + ?Sized>(phi: &F, mut a: f64, mut b: f64) -> Option<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (lo, hi) = (a, b);
    let f = |x: f64| displacement(phi, x).map(f64::abs).unwrap_or(f64::INFINITY);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut x = 0.5 * (a + b);
    let mut best = f(x);
    for _ in 0..20 {
        let jet = phi.jet(x, 2).ok()?;
        let (g1, g2) = (jet.deriv(1) - 1.0, jet.deriv(2));
        if g2 == 0.0 {
            break;
        }
        let next = x - g1 / g2;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let value = f(next);
        if value > best {
            break;
        }
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs());
        x = next;
        best = value;
        if done {
            break;
        }
    }
    Some(x)
}

/// Fixed points of `φ` on the grid of `search`.
///
/// Sign changes of `φ(x) - x` between grid neighbours are refined by
/// bisection; local minima of `|φ(x) - x|` without a sign change are refined
/// as touching roots and kept (flagged tangential) when the residual is
/// below `tol`. Grid points where `φ` cannot be evaluated are skipped.
pub fn fixed_points<F: SmoothFunction + ?Sized>(phi: &F, search: &CompactInterval, tol: f64) -> FixedPointSet {
    let grid = search.grid();
    let g: Vec<Option<f64>> = grid.iter().map(|&x| displacement(phi, x)).collect();
    let mut found: Vec<FixedPoint> = Vec::new();
    let mut push = |x: f64, tangential: bool, bracket: [f64; 2]| {
        if let Some(r) = displacement(phi, x).map(f64::abs) {
            if r <= tol {
                found.push(FixedPoint { x, residual: r, tangential, bracket });
            }
        }
    };

    for i in 0..grid.len() {
        let Some(gi) = g[i] else { continue };
        if gi == 0.0 {
            let left = i.checked_sub(1).and_then(|j| g[j]);
            let right = g.get(i + 1).copied().flatten();
            let touching = matches!((left, right), (Some(l), Some(r)) if l != 0.0 && r != 0.0 && (l < 0.0) == (r < 0.0));
            push(grid[i], touching, [grid[i], grid[i]]);
            continue;
        }
        if let Some(Some(gj)) = g.get(i + 1) {
            if *gj != 0.0 && (gi < 0.0) != (*gj < 0.0) {
                if let Some(x) = bisect(phi, grid[i], grid[i + 1], gi, tol) {
                    push(x, false, [grid[i], grid[i + 1]]);
                }
            }
        }
        if i == 0 || i + 1 == grid.len() {
            continue;
        }
        if let (Some(gl), Some(gr)) = (g[i - 1], g[i + 1]) {
            let same_side = (gl < 0.0) == (gi < 0.0) && (gr < 0.0) == (gi < 0.0) && gl != 0.0 && gr != 0.0;
            if same_side && gi.abs() <= gl.abs() && gi.abs() <= gr.abs() {
                if let Some(x) = touching_root(phi, grid[i - 1], grid[i + 1]) {
                    push(x, true, [grid[i - 1], grid[i + 1]]);
                }
            }
        }
    }

    found.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut points: Vec<FixedPoint> = Vec::with_capacity(found.len());
    for p in found {
        match points.last_mut() {
            Some(q) if p.x - q.x <= tol.max(1e-12 * (1.0 + p.x.abs())) => {
                if p.residual < q.residual {
                    *q = p;
                }
            }
            _ => points.push(p),
        }
    }
    FixedPointSet { points }
}

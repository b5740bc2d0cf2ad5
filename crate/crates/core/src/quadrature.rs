//! Adaptive Simpson quadrature.

use crate::{Error, Result};

const MAX_DEPTH: usize = 50;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn refine<F: Fn(f64) -> Result<f64>>(f: &F, p: Panel, eps: f64, depth: usize) -> Result<f64> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= p.a || m >= p.b {
        return Err(Error::Quadrature { a: p.a, b: p.b });
    }
    let l = refine(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * eps, depth - 1)?;
    let r = refine(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * eps, depth - 1)?;
    Ok(l + r)
}

/// `∫_a^b f` to roughly `rel_tol` relative accuracy (with an absolute floor
/// of `rel_tol` times a coarse magnitude estimate).
pub fn integrate<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // Start from eight panels so that narrow features are not missed.
    let panels = 8;
    let h = (hi - lo) / panels as f64;
    let mut first = Vec::with_capacity(panels);
    let mut scale: f64 = 0.0;
    for i in 0..panels {
        let pa = lo + h * i as f64;
        let pb = if i + 1 == panels { hi } else { lo + h * (i + 1) as f64 };
        let (fa, fm, fb) = (f(pa)?, f(0.5 * (pa + pb))?, f(pb)?);
        let whole = simpson(pa, pb, fa, fm, fb);
        scale += whole.abs().max((pb - pa) * fa.abs().max(fm.abs()).max(fb.abs()) * 1e-3);
        first.push(Panel { a: pa, b: pb, fa, fm, fb, whole });
    }
    let eps = rel_tol * scale.max(f64::MIN_POSITIVE) / panels as f64;
    let mut total = 0.0;
    for p in first {
        total += refine(&f, p, eps, MAX_DEPTH)?;
    }
    Ok(sign * total)
}

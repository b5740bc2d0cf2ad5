//! Truncated Taylor series in normalized form: `c[k] = f^(k)(x0) / k!`.
//!
//! All slices in one computation share the same length (order + 1).

pub(crate) fn constant(c: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    out[0] = c;
    out
}

pub(crate) fn variable(x: f64, len: usize) -> Vec<f64> {
    let mut out = constant(x, len);
    if len > 1 {
        out[1] = 1.0;
    }
    out
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// Requires `b[0] != 0`.
pub(crate) fn div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    for k in 0..n {
        let mut acc = a[k];
        for j in 1..=k {
            acc -= b[j] * c[k - j];
        }
        c[k] = acc / b[0];
    }
    c
}

pub(crate) fn powi(a: &[f64], mut p: u32) -> Vec<f64> {
    let mut result = constant(1.0, a.len());
    let mut base = a.to_vec();
    while p > 0 {
        if p & 1 == 1 {
            result = mul(&result, &base);
        }
        p >>= 1;
        if p > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

/// `a^p` for real `p`; requires `a[0] > 0`.
///
/// From `a c' = p a' c`: `c[k] = (1/(k a0)) Σ_{j=1}^{k} (p j - (k - j)) a[j] c[k-j]`.
pub(crate) fn powf(a: &[f64], p: f64) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    c[0] = a[0].powf(p);
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += (p * j as f64 - (k - j) as f64) * a[j] * c[k - j];
        }
        c[k] = acc / (k as f64 * a[0]);
    }
    c
}

/// Requires `a[0] > 0`.
pub(crate) fn sqrt(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    c[0] = a[0].sqrt();
    for k in 1..n {
        let mut acc = a[k];
        for j in 1..k {
            acc -= c[j] * c[k - j];
        }
        c[k] = acc / (2.0 * c[0]);
    }
    c
}

pub(crate) fn exp(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    c[0] = a[0].exp();
    for k in 1..n {
        let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * c[k - j]).sum();
        c[k] = acc / k as f64;
    }
    c
}

/// Requires `a[0] > 0`.
pub(crate) fn ln(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    c[0] = a[0].ln();
    for k in 1..n {
        let acc: f64 = (1..k).map(|j| j as f64 * c[j] * a[k - j]).sum();
        c[k] = (a[k] - acc / k as f64) / a[0];
    }
    c
}

pub(crate) fn sin_cos(a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut s = vec![0.0; n];
    let mut c = vec![0.0; n];
    s[0] = a[0].sin();
    c[0] = a[0].cos();
    for k in 1..n {
        let mut acc_s = 0.0;
        let mut acc_c = 0.0;
        for j in 1..=k {
            acc_s += j as f64 * a[j] * c[k - j];
            acc_c += j as f64 * a[j] * s[k - j];
        }
        s[k] = acc_s / k as f64;
        c[k] = -acc_c / k as f64;
    }
    (s, c)
}

/// `t = tanh(a)` with `t' = (1 - t²) a'`.
pub(crate) fn tanh(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut t = vec![0.0; n];
    let mut v = vec![0.0; n]; // 1 - t²
    t[0] = a[0].tanh();
    v[0] = 1.0 - t[0] * t[0];
    for k in 1..n {
        let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * v[k - j]).sum();
        t[k] = acc / k as f64;
        let sq: f64 = (0..=k).map(|i| t[i] * t[k - i]).sum();
        v[k] = -sq;
    }
    t
}

/// `outer(inner)` where `outer` is expanded around `inner[0]`.
pub(crate) fn compose(outer: &[f64], inner: &[f64]) -> Vec<f64> {
    let n = outer.len();
    let mut delta = inner.to_vec();
    delta[0] = 0.0;
    let mut acc = constant(outer[n - 1], n);
    for k in (0..n - 1).rev() {
        acc = mul(&acc, &delta);
        acc[0] += outer[k];
    }
    acc
}

/// Coefficients `d` (with `d[0] = 0`) of the series reversion of
/// `δ ↦ Σ_{k≥1} c[k] δ^k`; requires `c[1] != 0`.
pub(crate) fn reversion(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    d[1] = 1.0 / c[1];
    let mut shifted = c.to_vec();
    shifted[0] = 0.0;
    for k in 2..n {
        let composed = compose(&shifted, &d);
        d[k] = -composed[k] / c[1];
    }
    d
}

pub(crate) fn to_raw(c: &[f64]) -> Vec<f64> {
    let mut fact = 1.0;
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= k as f64;
            }
            v * fact
        })
        .collect()
}

pub(crate) fn from_raw(d: &[f64]) -> Vec<f64> {
    let mut fact = 1.0;
    d.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= k as f64;
            }
            v / fact
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn exp_of_log_is_identity() {
        let a = [2.0, 0.5, -0.25, 0.125, 0.3];
        assert!(close(&exp(&ln(&a)), &a, 1e-14));
    }

    #[test]
    fn sqrt_squared_is_identity() {
        let a = [3.0, 1.0, 0.2, -0.4, 0.05];
        let r = sqrt(&a);
        assert!(close(&mul(&r, &r), &a, 1e-14));
        assert!(close(&powf(&a, 0.5), &r, 1e-14));
    }

    #[test]
    fn pythagoras() {
        let a = [0.7, 1.2, -0.3, 0.9];
        let (s, c) = sin_cos(&a);
        let one = add(&mul(&s, &s), &mul(&c, &c));
        assert!(close(&one, &constant(1.0, 4), 1e-14));
    }

    #[test]
    fn tanh_matches_exp_formula() {
        let a = [0.4, 1.0, 0.5, -0.2, 0.1];
        let e2 = exp(&a.iter().map(|v| 2.0 * v).collect::<Vec<_>>());
        let one = constant(1.0, a.len());
        let expected = div(&sub(&e2, &one), &add(&e2, &one));
        assert!(close(&tanh(&a), &expected, 1e-13));
    }

    #[test]
    fn reversion_inverts() {
        let c = [0.0, 2.0, -0.7, 0.3, 1.1, -0.4];
        let d = reversion(&c);
        let composed = compose(&c, &d);
        assert!(close(&composed, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 1e-13));
    }

    #[test]
    fn division_and_powers() {
        let a = [1.5, -0.5, 0.25, 0.1];
        let b = [0.8, 0.3, 0.0, -0.2];
        assert!(close(&mul(&div(&a, &b), &b), &a, 1e-14));
        assert!(close(&powi(&a, 3), &mul(&a, &mul(&a, &a)), 1e-14));
        assert!(close(&powf(&a, 3.0), &powi(&a, 3), 1e-13));
    }
}

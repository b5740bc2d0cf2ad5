//! Partial exponential Bell polynomials and Faà di Bruno's formula.
//!
//! `B_{r,j}(y_1, …, y_{r-j+1})` is evaluated by the recurrence
//!
//! ```text
//! B_{r,j}(y) = Σ_{i=1}^{r-j+1} C(r-1, i-1) · y_i · B_{r-i, j-1}(y)
//! B_{0,0} = 1,   B_{r,0} = 0 (r ≥ 1),   B_{0,j} = 0 (j ≥ 1)
//! ```
//!
//! With all arguments equal to one, `B_{n,k}` counts set partitions of an
//! n-set into k blocks; [`stirling_oracle`] enumerates those partitions
//! directly and serves as an independent check.

use crate::{Error, Result};
use std::sync::OnceLock;

/// Rows of Pascal's triangle held in the table.
pub const PASCAL_ROWS: usize = 64;

/// Largest `n` accepted by the exact integer path and the enumeration oracle.
pub const EXACT_MAX: usize = 12;

fn pascal() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(PASCAL_ROWS + 1);
        for n in 0..=PASCAL_ROWS {
            let mut row = vec![1u64; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(n, k)` from the precomputed table; zero when `k > n`.
///
/// # Panics
/// If `n` exceeds [`PASCAL_ROWS`].
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(n <= PASCAL_ROWS, "binomial row {n} outside the Pascal table");
    if k > n {
        0
    } else {
        pascal()[n][k]
    }
}

pub fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n, k) as f64
}

fn check_indices(r: usize, j: usize, available: usize) -> Result<()> {
    if j > r {
        return Err(Error::IndexContract(format!("B_{{{r},{j}}} requires j <= r")));
    }
    if r > PASCAL_ROWS {
        return Err(Error::IndexContract(format!("order {r} exceeds the Pascal table")));
    }
    if r >= 1 && j >= 1 && available < r - j + 1 {
        return Err(Error::IndexContract(format!(
            "B_{{{r},{j}}} needs {} arguments, got {available}",
            r - j + 1
        )));
    }
    Ok(())
}

/// Generic recurrence over the triangle restricted to `r' - j' <= r - j`.
fn bell_recurrence<T>(r: usize, j: usize, y: &[T], zero: T, one: T, scale: impl Fn(u64) -> T) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    if j == 0 {
        return if r == 0 { one } else { zero };
    }
    let width = r - j;
    // table[jj][d] = B_{jj + d, jj}
    let mut prev: Vec<T> = (0..=width).map(|d| if d == 0 { one } else { zero }).collect();
    for jj in 1..=j {
        let mut cur = vec![zero; width + 1];
        for (d, slot) in cur.iter_mut().enumerate() {
            let rr = jj + d;
            let mut acc = zero;
            for i in 1..=d + 1 {
                // B_{rr - i, jj - 1} has offset rr - i - (jj - 1) = d + 1 - i
                acc = acc + scale(binomial(rr - 1, i - 1)) * y[i - 1] * prev[d + 1 - i];
            }
            *slot = acc;
        }
        prev = cur;
    }
    prev[width]
}

/// Value of the partial exponential Bell polynomial `B_{r,j}` at `y`
/// (`y[0] = y_1`).
///
/// When every argument is an integer of moderate size and `r <= 12` the
/// evaluation runs in exact integer arithmetic.
pub fn bell_partial(r: usize, j: usize, y: &[f64]) -> Result<f64> {
    check_indices(r, j, y.len())?;
    let needed = if j == 0 { 0 } else { r - j + 1 };
    let args = &y[..needed];
    let integral = args.iter().all(|v| v.fract() == 0.0 && v.abs() <= 1e6);
    if r <= EXACT_MAX && integral {
        let ints: Vec<i64> = args.iter().map(|&v| v as i64).collect();
        return Ok(bell_partial_exact(r, j, &ints)? as f64);
    }
    Ok(bell_recurrence(r, j, args, 0.0, 1.0, |c| c as f64))
}

/// Exact integer evaluation of `B_{r,j}`.
pub fn bell_partial_exact(r: usize, j: usize, y: &[i64]) -> Result<i128> {
    check_indices(r, j, y.len())?;
    let needed = if j == 0 { 0 } else { r - j + 1 };
    let args: Vec<i128> = y[..needed].iter().map(|&v| v as i128).collect();
    Ok(bell_recurrence(r, j, &args, 0i128, 1i128, |c| c as i128))
}

/// Triangular table of `B_{r,j}(y)` for `0 <= j <= r <= max_r`.
#[derive(Debug, Clone)]
pub struct BellTable {
    max_r: usize,
    values: Vec<Vec<f64>>,
}

impl BellTable {
    /// Builds the whole triangle in one pass. Needs `y.len() >= max_r`.
    pub fn new(max_r: usize, y: &[f64]) -> Result<Self> {
        if max_r > PASCAL_ROWS {
            return Err(Error::IndexContract(format!("order {max_r} exceeds the Pascal table")));
        }
        if y.len() < max_r {
            return Err(Error::LengthMismatch { expected: max_r, found: y.len() });
        }
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(max_r + 1);
        for r in 0..=max_r {
            let mut row = vec![0.0; r + 1];
            if r == 0 {
                row[0] = 1.0;
            }
            for j in 1..=r {
                let mut acc = 0.0;
                for i in 1..=r - j + 1 {
                    acc += binomial_f64(r - 1, i - 1) * y[i - 1] * values[r - i][j - 1];
                }
                row[j] = acc;
            }
            values.push(row);
        }
        Ok(Self { max_r, values })
    }

    pub fn max_r(&self) -> usize {
        self.max_r
    }

    /// `B_{r,j}`; zero outside the triangle.
    pub fn get(&self, r: usize, j: usize) -> f64 {
        if r > self.max_r || j > r {
            0.0
        } else {
            self.values[r][j]
        }
    }
}

/// Counts set partitions of `{1..n}` into exactly `k` blocks by walking all
/// restricted-growth strings.
pub fn stirling_oracle(n: usize, k: usize) -> Result<u64> {
    if k > n || n > EXACT_MAX {
        return Err(Error::IndexContract(format!("stirling_oracle({n}, {k}) needs 0 <= k <= n <= {EXACT_MAX}")));
    }
    if n == 0 {
        return Ok(1);
    }
    // a[i] <= 1 + max(a[0..i]), a[0] = 0
    let mut a = vec![0usize; n];
    let mut count = 0u64;
    loop {
        let blocks = a.iter().max().map_or(0, |m| m + 1);
        if blocks == k {
            count += 1;
        }
        // advance to the next restricted-growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(count);
            }
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= prefix_max {
                a[i] += 1;
                for slot in a.iter_mut().skip(i + 1) {
                    *slot = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Bell number `B_n` as the row sum of the enumeration oracle.
pub fn bell_number_oracle(n: usize) -> Result<u64> {
    (0..=n).map(|k| stirling_oracle(n, k)).sum()
}

/// `(f ∘ g)^{(s)}(x)` from raw derivatives `f^{(k)}(g(x))` and `g^{(k)}(x)`,
/// `k = 0..=s`.
pub fn faa_di_bruno(f_derivs: &[f64], g_derivs: &[f64], s: usize) -> Result<f64> {
    if f_derivs.len() != s + 1 {
        return Err(Error::LengthMismatch { expected: s + 1, found: f_derivs.len() });
    }
    if g_derivs.len() != s + 1 {
        return Err(Error::LengthMismatch { expected: s + 1, found: g_derivs.len() });
    }
    if s == 0 {
        return Ok(f_derivs[0]);
    }
    let table = BellTable::new(s, &g_derivs[1..])?;
    Ok((1..=s).map(|j| f_derivs[j] * table.get(s, j)).sum())
}

//! Bessel functions of the first kind `J_n` for integer order and their
//! positive zeros.
//!
//! Evaluation uses the power series where its terms decrease monotonically
//! from the first one (no cancellation), and Miller's downward recurrence
//! normalized by `J_0 + 2 * sum J_2k = 1` everywhere else.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Every stored root satisfies `|J_n(root)| < ROOT_TOLERANCE`.
pub const ROOT_TOLERANCE: f64 = 1e-10;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_n(x)` for integer order `n >= 0` and finite `x >= 0`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InputDomain(format!(
            "Bessel order must be non-negative, got {n}"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InputDomain(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(jn(n as usize, x))
}

/// Unchecked `J_n(x)`; callers guarantee `x` is finite and non-negative.
pub(crate) fn jn(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x * x * 0.25 <= (n + 1) as f64 {
        series(n, x)
    } else {
        miller(n, x)
    }
}

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 500 {
            return sum;
        }
    }
}

fn miller(n: usize, x: f64) -> f64 {
    let top = n.max(x.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two_over_x = 2.0 / x;
    let mut above = 0.0; // J_{j+1}, unnormalized
    let mut current = 1.0; // J_j, unnormalized
    let mut even_sum = 0.0;
    let mut wanted = 0.0;
    for j in (1..=start).rev() {
        let below = j as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            wanted *= RESCALE_BY;
            even_sum *= RESCALE_BY;
        }
        // `current` now holds J_{j-1}.
        if (j - 1) % 2 == 0 {
            even_sum += current;
        }
        if j == n {
            wanted = above;
        }
    }
    let norm = 2.0 * even_sum - current;
    if n == 0 {
        current / norm
    } else {
        wanted / norm
    }
}

/// `dJ_n/dx`, from `J_n' = (J_{n-1} - J_{n+1}) / 2` and `J_0' = -J_1`.
fn jn_derivative(n: usize, x: f64) -> f64 {
    if n == 0 {
        -jn(1, x)
    } else {
        0.5 * (jn(n - 1, x) - jn(n + 1, x))
    }
}

/// First `count` positive zeros of `J_n`, in increasing order.
pub fn bessel_roots(n: i32, count: usize) -> Result<Vec<f64>> {
    if n < 0 {
        return Err(Error::InputDomain(format!(
            "Bessel order must be non-negative, got {n}"
        )));
    }
    if count == 0 {
        return Err(Error::InputDomain("root count must be at least 1".into()));
    }
    let order = n as usize;
    let mut roots: Vec<f64> = Vec::with_capacity(count);
    for _ in 0..count {
        let (lo, hi) = match roots.last() {
            None => first_bracket(order),
            Some(&prev) => next_bracket(order, prev),
        };
        let root = refine(order, lo, hi);
        let residual = jn(order, root).abs();
        if residual >= ROOT_TOLERANCE {
            return Err(Error::InputDomain(format!(
                "root of J_{order} near {root} failed verification (|J| = {residual:e})"
            )));
        }
        roots.push(root);
    }
    Ok(roots)
}

fn first_bracket(order: usize) -> (f64, f64) {
    if order == 0 {
        return (2.0, 3.0);
    }
    // J_n has no zeros on (0, j_{n,1}) and n + 1.8557 n^(1/3) sits just below
    // j_{n,1}, so scanning up from slightly under it finds the first zero.
    let n = order as f64;
    let seed = n + 1.8557 * n.cbrt();
    scan(order, (seed - 1.0).max(n.max(0.5)))
}

fn next_bracket(order: usize, prev: f64) -> (f64, f64) {
    let lo = prev + 0.5 * PI;
    let hi = prev + 1.5 * PI;
    if jn(order, lo) * jn(order, hi) < 0.0 {
        (lo, hi)
    } else {
        scan(order, prev + 1e-3)
    }
}

/// Walks forward in quarter steps until `J_n` changes sign.
fn scan(order: usize, from: f64) -> (f64, f64) {
    const STEP: f64 = 0.25;
    let mut a = from;
    let mut fa = jn(order, a);
    loop {
        let b = a + STEP;
        let fb = jn(order, b);
        if fa == 0.0 {
            return (a, a);
        }
        if fa * fb <= 0.0 {
            return (a, b);
        }
        a = b;
        fa = fb;
    }
}

/// Safeguarded Newton iteration inside a sign-change bracket.
fn refine(order: usize, mut lo: f64, mut hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let f_lo = jn(order, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = jn(order, x);
        if f == 0.0 {
            return x;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let df = jn_derivative(order, x);
        let newton = x - f / df;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}

/// Precomputed zeros `alpha[n][i]` for `n` in `0..=max_order`, `i` in `1..=max_root`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRootTable {
    max_order: usize,
    max_root: usize,
    roots: Vec<Vec<f64>>,
}

impl BesselRootTable {
    pub fn build(max_order: usize, max_root: usize) -> Result<Self> {
        if max_root == 0 {
            return Err(Error::InputDomain("max_root must be at least 1".into()));
        }
        if max_order > i32::MAX as usize {
            return Err(Error::InputDomain(format!("order {max_order} too large")));
        }
        let roots = (0..=max_order)
            .into_par_iter()
            .map(|n| bessel_roots(n as i32, max_root))
            .collect::<Result<Vec<_>>>()?;
        Ok(BesselRootTable {
            max_order,
            max_root,
            roots,
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn max_root(&self) -> usize {
        self.max_root
    }

    /// Root `alpha_{n,i}` with 1-based `i`.
    ///
    /// Panics when `(n, i)` is outside the table.
    pub fn root(&self, n: usize, i: usize) -> f64 {
        assert!(i >= 1, "root index is 1-based");
        self.roots[n][i - 1]
    }

    /// All stored roots of order `n`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.roots[n]
    }

    pub fn covers(&self, max_order: usize, max_root: usize) -> bool {
        max_order <= self.max_order && max_root <= self.max_root
    }

    /// One line per order, roots as comma-separated values with 15
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.roots {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.14e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Builds the root table used by the Fourier-Bessel transform.
pub fn build_root_table(max_order: usize, max_root: usize) -> Result<BesselRootTable> {
    BesselRootTable::build(max_order, max_root)
}

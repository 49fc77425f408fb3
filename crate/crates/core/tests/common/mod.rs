//! High-precision reference values shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fractional bits of the fixed-point arithmetic.
const FRAC: u32 = 900;

fn one() -> BigInt {
    BigInt::from(1) << FRAC
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC
}

/// Fixed-point value of `num / den`.
pub fn ratio(num: i64, den: i64) -> BigInt {
    (BigInt::from(num) << FRAC) / BigInt::from(den)
}

pub fn to_f64(x: &BigInt) -> f64 {
    // Keep 64 fractional bits, then scale.
    let shifted: BigInt = x >> (FRAC - 64);
    shifted.to_f64().unwrap() / 2f64.powi(64)
}

/// `J_n(x)` from the raw power series, summed until the terms underflow
/// the fixed-point resolution.
pub fn bessel_series(n: u32, x: &BigInt) -> BigInt {
    let half = x >> 1u32;
    let h2 = mul(&half, &half);
    let mut term = one();
    for k in 1..=n {
        term = mul(&term, &half) / BigInt::from(k);
    }
    let mut sum = term.clone();
    let x_units = to_f64(x);
    let mut k: u64 = 1;
    loop {
        term = -(mul(&term, &h2) / BigInt::from(k * (k + n as u64)));
        sum += &term;
        if term.is_zero() || (k as f64 > x_units && term.abs() < BigInt::from(1)) {
            break;
        }
        k += 1;
    }
    sum
}

pub fn bessel_j(n: u32, x: f64) -> f64 {
    let scaled = (x * 2f64.powi(60)).round() as i128;
    let fixed = BigInt::from(scaled) << (FRAC - 60);
    to_f64(&bessel_series(n, &fixed))
}

/// First `count` positive zeros of `J_n`: sign changes on a 0.1 grid, then
/// 70 bisection steps.
pub fn bessel_zeros(n: u32, count: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let mut k = 1i64;
    let mut lo = ratio(k, 10);
    let mut f_lo = bessel_series(n, &lo);
    while zeros.len() < count {
        k += 1;
        let hi = ratio(k, 10);
        let f_hi = bessel_series(n, &hi);
        if f_lo.is_zero() {
            zeros.push(to_f64(&lo));
        } else if f_lo.sign() != f_hi.sign() && !f_hi.is_zero() {
            let (mut a, mut b) = (lo.clone(), hi.clone());
            let neg_at_a = f_lo.is_negative();
            for _ in 0..70 {
                let mid: BigInt = (&a + &b) >> 1u32;
                if bessel_series(n, &mid).is_negative() == neg_at_a {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            zeros.push(to_f64(&((a + b) >> 1u32)));
        }
        lo = hi;
        f_lo = f_hi;
    }
    zeros
}

/// Exact fixed-point image of a finite `f64`.
pub fn fixed(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac_field = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_field == 0 {
        (frac_field, -1074)
    } else {
        (frac_field | (1u64 << 52), exp_field - 1075)
    };
    let shift = FRAC as i64 + exp;
    let m = BigInt::from(mantissa);
    let v = if shift >= 0 { m << shift as u32 } else { m >> (-shift) as u32 };
    if negative {
        -v
    } else {
        v
    }
}

fn solve_fixed(mut g: Vec<Vec<BigInt>>, mut rhs: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let m = g.len();
    for col in 0..m {
        let pivot = (col..m).max_by_key(|&r| g[r][col].abs()).unwrap();
        assert!(!g[pivot][col].is_zero(), "singular system in oracle");
        g.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in col + 1..m {
            let factor = (&g[r][col] << FRAC) / &g[col][col];
            for c in col..m {
                let d = mul(&factor, &g[col][c]);
                g[r][c] -= d;
            }
            for c in 0..rhs[r].len() {
                let d = mul(&factor, &rhs[col][c]);
                rhs[r][c] -= d;
            }
        }
    }
    let width = rhs[0].len();
    let mut z = vec![vec![BigInt::zero(); width]; m];
    for r in (0..m).rev() {
        for c in 0..width {
            let mut acc = rhs[r][c].clone();
            for k in r + 1..m {
                acc -= mul(&g[r][k], &z[k][c]);
            }
            z[r][c] = (acc << FRAC) / &g[r][r];
        }
    }
    z
}

/// Rows of `x` (as fixed point) that are pairwise distinct.
fn distinct_rows(x: &[Vec<f64>]) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..x.len() {
        if !keep.iter().any(|&j| x[j] == x[i]) {
            keep.push(i);
        }
    }
    keep
}

/// Minimum-norm least-squares solution of `x w = y` for every column of
/// `y`, computed as `x^T (x x^T)^-1 y` on the distinct rows of `x`; rows
/// repeated in `x` must carry equal targets. Returns one solution per
/// target column.
pub fn min_norm_solution(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let keep = distinct_rows(x);
    for i in 0..x.len() {
        let j = keep.iter().copied().find(|&j| x[j] == x[i]).unwrap();
        assert_eq!(y[i], y[j], "repeated rows with different targets");
    }
    let xf: Vec<Vec<BigInt>> = keep.iter().map(|&i| x[i].iter().map(|&v| fixed(v)).collect()).collect();
    let yf: Vec<Vec<BigInt>> = keep.iter().map(|&i| y[i].iter().map(|&v| fixed(v)).collect()).collect();
    let m = xf.len();
    let p = xf[0].len();
    let g: Vec<Vec<BigInt>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| (0..p).map(|k| mul(&xf[a][k], &xf[b][k])).sum())
                .collect()
        })
        .collect();
    let z = solve_fixed(g, yf);
    let targets = y[0].len();
    (0..targets)
        .map(|c| {
            (0..p)
                .map(|k| {
                    let v: BigInt = (0..m).map(|r| mul(&xf[r][k], &z[r][c])).sum();
                    to_f64(&v)
                })
                .collect()
        })
        .collect()
}

/// Component of `v` orthogonal to the row space of `x`.
pub fn null_component(x: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let keep = distinct_rows(x);
    let rows: Vec<Vec<f64>> = keep.iter().map(|&i| x[i].clone()).collect();
    let xv: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.iter().zip(v).map(|(a, b)| a * b).sum()])
        .collect();
    let projected = min_norm_solution(&rows, &xv);
    v.iter().zip(&projected[0]).map(|(a, b)| a - b).collect()
}

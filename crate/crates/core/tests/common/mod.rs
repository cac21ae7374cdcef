//! Reference checks written directly from the definitions, sharing no code
//! with the library beyond the rational type.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Signed, Zero};

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow(x: &Q, e: usize) -> Q {
    let mut out = Q::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

/// `Σ c_m x^m`, term by term.
pub fn poly_at(c: &[Q], x: &Q) -> Q {
    c.iter().enumerate().map(|(m, cm)| cm * pow(x, m)).sum()
}

/// `Σ m c_m x^(m−1)`.
pub fn dpoly_at(c: &[Q], x: &Q) -> Q {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(m, cm)| cm * q(m as i64) * pow(x, m - 1))
        .sum()
}

/// Sign conditions of the open dual systems at `r`.
pub fn open_system_holds(c: &[Q], k: usize, r: &Q, implicit: bool) -> bool {
    if c.iter().all(Zero::is_zero) {
        return false;
    }
    let at_points = (1..=k).all(|j| {
        let x = q(j as i64);
        let v = poly_at(c, &x);
        !v.is_negative() && !(r * &v - dpoly_at(c, &x)).is_negative()
    });
    let origin = poly_at(c, &q(0)).is_negative();
    let slope0 = !implicit || !dpoly_at(c, &q(0)).is_positive();
    at_points && origin && slope0
}

/// Sign conditions of the closed dual systems at `r`.
pub fn closed_system_holds(c: &[Q], k: usize, r: &Q, implicit: bool) -> bool {
    if c.iter().all(Zero::is_zero) {
        return false;
    }
    let at_points = (1..=k).all(|j| {
        let x = q(j as i64);
        let v = poly_at(c, &x);
        !v.is_negative() && !(r * &v - dpoly_at(c, &x)).is_negative()
    });
    let origin = poly_at(c, &q(0)).is_zero();
    let slope0 = !implicit || dpoly_at(c, &q(0)).is_zero();
    at_points && origin && slope0
}

/// `Σ α_j = 1` and `Σ j^m α_j = m Σ_{j ≥ 0} j^(m−1) β_j` for `m = 1..=p`,
/// with `0^0 = 1`. `alpha[j−1] = α_j`, `beta[j] = β_j`.
pub fn order_conditions_hold(alpha: &[Q], beta: &[Q], p: usize) -> bool {
    let k = alpha.len();
    if alpha.iter().sum::<Q>() != Q::one() {
        return false;
    }
    (1..=p).all(|m| {
        let lhs: Q = (1..=k).map(|j| pow(&q(j as i64), m) * &alpha[j - 1]).sum();
        let rhs: Q = (0..=k).map(|j| q(m as i64) * pow(&q(j as i64), m - 1) * &beta[j]).sum();
        lhs == rhs
    })
}

/// `min α_j/β_j` over `β_j > 0` when every coefficient is nonnegative;
/// `None` if no `β_j` (j ≥ 1) is positive.
pub fn ssp_coefficient(alpha: &[Q], beta: &[Q]) -> Option<Q> {
    if alpha.iter().chain(beta).any(Signed::is_negative) {
        return Some(Q::zero());
    }
    (1..=alpha.len())
        .filter(|&j| beta[j].is_positive())
        .map(|j| &alpha[j - 1] / &beta[j])
        .min()
}

/// Solves the square or tall system `M x = b` exactly when `M` has full
/// column rank and the system is consistent.
fn solve_full_column_rank(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let mut r = m[i].clone();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        let p = (pivot_row..rows).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(pivot_row, p);
        let pv = aug[pivot_row][c].clone();
        for v in aug[pivot_row].iter_mut() {
            *v /= &pv;
        }
        for r in 0..rows {
            if r != pivot_row && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for cc in 0..=cols {
                    let delta = &f * &aug[pivot_row][cc];
                    aug[r][cc] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if aug[cols..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| aug[c][cols].clone()).collect())
}

/// Brute force: `{Ax = b, x ≥ 0}` is feasible iff some set of linearly
/// independent columns gives a nonnegative basic solution.
pub fn vertex_enumeration_feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    if b.iter().all(Zero::is_zero) {
        return true;
    }
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|c| mask & (1 << c) != 0).collect();
        if cols.len() > m {
            continue;
        }
        let sub: Vec<Vec<Q>> = a.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
        if let Some(x) = solve_full_column_rank(&sub, b) {
            if x.iter().all(|v| !v.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// `x ≥ 0`, `Ax = b`.
pub fn is_solution(a: &[Vec<Q>], b: &[Q], x: &[Q]) -> bool {
    x.iter().all(|v| !v.is_negative())
        && a.iter()
            .zip(b)
            .all(|(row, bi)| row.iter().zip(x).map(|(u, v)| u * v).sum::<Q>() == *bi)
}

/// `Aᵀy ≥ 0`, `bᵀy < 0`.
pub fn is_farkas(a: &[Vec<Q>], b: &[Q], y: &[Q]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    let by: Q = b.iter().zip(y).map(|(u, v)| u * v).sum();
    by.is_negative() && (0..n).all(|c| !a.iter().zip(y).map(|(row, yi)| &row[c] * yi).sum::<Q>().is_negative())
}

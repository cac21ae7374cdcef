//! Exact Phase-I simplex for `{Ax = b, x ≥ 0}` with Farkas certificates.
//!
//! The solver never optimizes an objective of its own; it only decides
//! feasibility. When the system is infeasible the final Phase-I duals are
//! turned into a vector `y` with `Aᵀy ≥ 0` and `bᵀy < 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{normalize_first_nonzero, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint matrix has {rows} rows but right-hand side has {rhs} entries")]
    DimensionMismatch { rows: usize, rhs: usize },
    #[error("feasibility problem needs at least one row and one column (got {rows}x{cols})")]
    Empty { rows: usize, cols: usize },
}

/// The system `{A x = b, x ≥ 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityProblem {
    a: RationalMatrix,
    b: Vec<Rational>,
}

impl FeasibilityProblem {
    pub fn new(a: RationalMatrix, b: Vec<Rational>) -> Result<Self, LpError> {
        if a.rows() != b.len() {
            return Err(LpError::DimensionMismatch {
                rows: a.rows(),
                rhs: b.len(),
            });
        }
        if a.rows() == 0 || a.cols() == 0 {
            return Err(LpError::Empty {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.b
    }

    /// `x ≥ 0` and `Ax = b`, checked exactly.
    pub fn is_witness(&self, x: &[Rational]) -> bool {
        x.len() == self.a.cols()
            && x.iter().all(|v| !v.is_negative())
            && self.a.mul_vec(x) == self.b
    }

    /// `Aᵀy ≥ 0` and `bᵀy < 0`, checked exactly.
    pub fn is_farkas_certificate(&self, y: &[Rational]) -> bool {
        if y.len() != self.a.rows() {
            return false;
        }
        let by = self
            .b
            .iter()
            .zip(y)
            .fold(Rational::zero(), |acc, (b, y)| acc + b * y);
        by.is_negative() && self.a.transpose_mul_vec(y).iter().all(|v| !v.is_negative())
    }
}

/// One of the two mutually exclusive alternatives of Farkas' lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityOutcome {
    /// `x ≥ 0` with `Ax = b`.
    Feasible { x: Vec<Rational> },
    /// `y` with `Aᵀy ≥ 0`, `bᵀy < 0`, scaled so the first nonzero entry is `±1`.
    Infeasible { y: Vec<Rational> },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    /// Re-checks whichever certificate this outcome carries.
    pub fn verify(&self, problem: &FeasibilityProblem) -> bool {
        match self {
            Self::Feasible { x } => problem.is_witness(x),
            Self::Infeasible { y } => problem.is_farkas_certificate(y),
        }
    }
}

/// Decides `{Ax = b, x ≥ 0}` with a Phase-I simplex using one artificial
/// variable per row and Bland's rule.
pub fn solve_feasibility(problem: &FeasibilityProblem) -> FeasibilityOutcome {
    let m = problem.a.rows();
    let n = problem.a.cols();
    let width = n + m + 1;
    let rhs_col = n + m;

    // Flip rows so that the artificial basis starts feasible.
    let signs: Vec<bool> = problem.b.iter().map(|v| v.is_negative()).collect();
    let mut tab: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); width];
            for j in 0..n {
                row[j] = problem.a.get(i, j).clone();
            }
            row[n + i] = Rational::one();
            row[rhs_col] = problem.b[i].clone();
            if signs[i] {
                for j in 0..n {
                    row[j] = -&row[j];
                }
                row[rhs_col] = -&row[rhs_col];
            }
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs for min Σ artificials; the last entry holds -objective.
    let mut cost = vec![Rational::zero(); width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[rhs_col] -= &row[rhs_col];
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        // Ratio test, ties broken by the smallest leaving variable index.
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &tab[i][rhs_col] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase I is bounded below by zero, so an entering column always has a
        // positive entry somewhere.
        let (pr, _) = leave.expect("phase-I objective is bounded below");
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    if cost[rhs_col].is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &var) in basis.iter().enumerate() {
            if var < n {
                x[var] = tab[i][rhs_col].clone();
            }
        }
        FeasibilityOutcome::Feasible { x }
    } else {
        // Dual of Phase I: reduced cost of artificial i is 1 - w_i.
        let mut y: Vec<Rational> = (0..m)
            .map(|i| {
                let w = Rational::one() - &cost[n + i];
                if signs[i] {
                    w
                } else {
                    -w
                }
            })
            .collect();
        normalize_first_nonzero(&mut y);
        FeasibilityOutcome::Infeasible { y }
    }
}

fn pivot(tab: &mut [Vec<Rational>], cost: &mut [Rational], pr: usize, pc: usize) {
    let p = tab[pr][pc].clone();
    for v in tab[pr].iter_mut() {
        *v = &*v / &p;
    }
    let pivot_row = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

/// Exact rank by fraction-free (Bareiss) elimination on an integer copy.
pub fn rank(matrix: &RationalMatrix) -> usize {
    let rows = matrix.rows();
    let cols = matrix.cols();
    // Clear denominators row by row; row scaling does not change the rank.
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let row = matrix.row(r);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

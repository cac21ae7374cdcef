//! Bisection for the optimal SSP coefficient.
//!
//! Every probe is an exact feasibility LP. A feasible probe yields a primal
//! witness (a method), an infeasible probe yields a Farkas polynomial. The
//! returned bracket carries one of each, so it can be re-checked without
//! trusting the bisection.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{upper_bound, BoundsError};
use crate::certificate::{verify_certificate, CertificateError, CertificatePolynomial};
use crate::lp::{rank, solve_feasibility, FeasibilityOutcome};
use crate::order::{build_lp, witness_to_method, MethodCoefficients, OrderError, PrimalWitness, Variant};
use crate::rational::{int, ipow, serde_rational, two_pow_neg, Rational, RationalMatrix};

/// Exponent of the default tolerance `2^-30`.
pub const DEFAULT_TOLERANCE_EXP: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimizerError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("tolerance must be positive (got {0})")]
    NonPositiveTolerance(Rational),
    #[error("{variant} methods with k = {k}, p = {p} have unbounded SSP coefficient")]
    Unbounded { variant: Variant, k: usize, p: usize },
    #[error("optimal SSP coefficient is zero (k = {k}, p = {p}, {variant})")]
    NoPositiveSsp { variant: Variant, k: usize, p: usize },
    #[error("inconsistent probe: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SspQuery {
    pub k: usize,
    pub p: usize,
    pub variant: Variant,
    #[serde(with = "serde_rational")]
    pub tolerance: Rational,
}

impl SspQuery {
    pub fn new(k: usize, p: usize, variant: Variant) -> Self {
        Self {
            k,
            p,
            variant,
            tolerance: two_pow_neg(DEFAULT_TOLERANCE_EXP),
        }
    }

    pub fn explicit(k: usize, p: usize) -> Self {
        Self::new(k, p, Variant::Explicit)
    }

    pub fn implicit(k: usize, p: usize) -> Self {
        Self::new(k, p, Variant::Implicit)
    }

    pub fn with_tolerance(mut self, tolerance: Rational) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<(), OptimizerError> {
        if self.k == 0 {
            return Err(OrderError::InvalidSteps(self.k).into());
        }
        if self.p == 0 {
            return Err(OrderError::InvalidOrder(self.p).into());
        }
        if !self.tolerance.is_positive() {
            return Err(OptimizerError::NonPositiveTolerance(self.tolerance.clone()));
        }
        Ok(())
    }
}

/// Result of one exact probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(PrimalWitness),
    /// Farkas polynomial in the open dual system at the probed `r`.
    Infeasible(CertificatePolynomial),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Is there a `k`-step order-`p` method with SSP coefficient at least `r`?
pub fn is_feasible(variant: Variant, k: usize, p: usize, r: &Rational) -> Result<Feasibility, OptimizerError> {
    let lp = build_lp(variant, k, p, r)?;
    Ok(match solve_feasibility(&lp) {
        FeasibilityOutcome::Feasible { x } => {
            Feasibility::Feasible(PrimalWitness::from_lp_solution(variant, k, p, r.clone(), &x))
        }
        FeasibilityOutcome::Infeasible { y } => {
            Feasibility::Infeasible(CertificatePolynomial::from_farkas(variant, k, r.clone(), y)?)
        }
    })
}

/// `r_lo ≤ C(k, p) < r_hi`, each side backed by an exact certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SspBracket {
    pub query: SspQuery,
    pub r_lo: Rational,
    pub r_hi: Rational,
    /// Witness at `r_lo`; absent only when no method of order `p` exists at all.
    pub primal_at_lo: Option<PrimalWitness>,
    pub dual_at_hi: CertificatePolynomial,
    /// `r_lo` is the optimum exactly (it equals the closed-form bound).
    pub exact: bool,
    /// Number of LP solves used.
    pub probes: usize,
}

impl SspBracket {
    pub fn gap(&self) -> Rational {
        &self.r_hi - &self.r_lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        crate::rational::to_f64(&((&self.r_lo + &self.r_hi) / int(2)))
    }

    /// Re-verifies both sides independently of the search.
    pub fn verify(&self) -> bool {
        let primal_ok = match &self.primal_at_lo {
            Some(w) => w.r == self.r_lo && w.k == self.query.k && w.p == self.query.p && w.verify(),
            None => self.r_lo.is_zero(),
        };
        let q = &self.dual_at_hi;
        let dual_ok = q.r() == &self.r_hi
            && q.k() == self.query.k
            && q.system().variant() == self.query.variant
            && !q.system().is_closed()
            && verify_certificate(q).verdict;
        primal_ok && dual_ok && self.r_lo < self.r_hi
    }
}

/// Brackets the optimal SSP coefficient to within `query.tolerance`.
///
/// The closed-form bound is probed first; if it is feasible the optimum is
/// that bound exactly. A zero bound, or infeasibility at `r = tolerance`,
/// gives the zero verdict. Otherwise `[0, bound]` is bisected.
pub fn optimal_ssp(query: &SspQuery) -> Result<SspBracket, OptimizerError> {
    query.validate()?;
    let SspQuery { k, p, variant, .. } = *query;
    let tol = query.tolerance.clone();
    if variant == Variant::Implicit && p == 1 {
        return Err(OptimizerError::Unbounded { variant, k, p });
    }
    let bound = upper_bound(variant, k, p)?.bound_value;
    let mut probes = 0usize;
    let mut probe = |r: &Rational| {
        probes += 1;
        is_feasible(variant, k, p, r)
    };
    let bracket = |r_lo, r_hi, primal_at_lo, dual_at_hi, exact, probes| SspBracket {
        query: query.clone(),
        r_lo,
        r_hi,
        primal_at_lo,
        dual_at_hi,
        exact,
        probes,
    };

    if bound.is_positive() {
        match probe(&bound)? {
            Feasibility::Feasible(w) => {
                let r_hi = &bound + &tol;
                let cert = match probe(&r_hi)? {
                    Feasibility::Infeasible(q) => q,
                    Feasibility::Feasible(_) => {
                        return Err(OptimizerError::Inconsistent(format!("feasible above the bound at r = {r_hi}")))
                    }
                };
                return Ok(bracket(bound, r_hi, Some(w), cert, true, probes));
            }
            Feasibility::Infeasible(cert_at_bound) => {
                let at_tol = if tol < bound { probe(&tol)? } else { Feasibility::Infeasible(cert_at_bound.clone()) };
                let cert_tol = match at_tol {
                    Feasibility::Infeasible(q) => q,
                    Feasibility::Feasible(w) => {
                        return bisect(query, w, cert_at_bound, probes);
                    }
                };
                let w0 = match probe(&Rational::zero())? {
                    Feasibility::Feasible(w) => Some(w),
                    Feasibility::Infeasible(_) => None,
                };
                let r_hi = cert_tol.r().clone();
                return Ok(bracket(Rational::zero(), r_hi, w0, cert_tol, false, probes));
            }
        }
    }

    // Zero bound: the optimum is 0 and the LP is infeasible for every r > 0.
    let cert = match probe(&tol)? {
        Feasibility::Infeasible(q) => q,
        Feasibility::Feasible(_) => {
            return Err(OptimizerError::Inconsistent(format!("feasible above a zero bound at r = {tol}")))
        }
    };
    let w0 = match probe(&Rational::zero())? {
        Feasibility::Feasible(w) => Some(w),
        Feasibility::Infeasible(_) => None,
    };
    let exact = w0.is_some();
    Ok(bracket(Rational::zero(), tol, w0, cert, exact, probes))
}

fn bisect(
    query: &SspQuery,
    mut lo: PrimalWitness,
    mut hi: CertificatePolynomial,
    mut probes: usize,
) -> Result<SspBracket, OptimizerError> {
    let tol = &query.tolerance;
    let gap = hi.r() - &lo.r;
    let cap = iteration_cap(&gap, tol);
    for _ in 0..cap {
        if &(hi.r() - &lo.r) <= tol {
            break;
        }
        let mid = (&lo.r + hi.r()) / int(2);
        probes += 1;
        match is_feasible(query.variant, query.k, query.p, &mid)? {
            Feasibility::Feasible(w) => lo = w,
            Feasibility::Infeasible(q) => hi = q,
        }
    }
    Ok(SspBracket {
        query: query.clone(),
        r_lo: lo.r.clone(),
        r_hi: hi.r().clone(),
        primal_at_lo: Some(lo),
        dual_at_hi: hi,
        exact: false,
        probes,
    })
}

/// `⌈log2(gap / tol)⌉ + 4`.
fn iteration_cap(gap: &Rational, tol: &Rational) -> usize {
    let mut n = 0usize;
    let mut width = tol.clone();
    while &width < gap {
        width *= int(2);
        n += 1;
    }
    n + 4
}

/// Runs independent queries on the rayon pool, preserving order.
pub fn optimal_ssp_many(queries: &[SspQuery]) -> Vec<Result<SspBracket, OptimizerError>> {
    queries.par_iter().map(optimal_ssp).collect()
}

/// The method of the witness at `r_lo`.
pub fn extract_optimal_method(bracket: &SspBracket) -> Result<MethodCoefficients, OptimizerError> {
    match &bracket.primal_at_lo {
        Some(w) if bracket.r_lo.is_positive() => Ok(witness_to_method(w)),
        _ => Err(no_positive(&bracket.query)),
    }
}

fn no_positive(q: &SspQuery) -> OptimizerError {
    OptimizerError::NoPositiveSsp {
        variant: q.variant,
        k: q.k,
        p: q.p,
    }
}

/// Which LP columns are nonzero; `β` indices include `0` for implicit methods.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Support {
    pub delta: Vec<usize>,
    pub beta: Vec<usize>,
}

impl Support {
    fn of(w: &PrimalWitness) -> Self {
        let nz = |v: &[Rational], offset: usize| {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, _)| i + offset)
                .collect()
        };
        Support {
            delta: nz(&w.delta, 1),
            beta: nz(&w.beta, 0),
        }
    }

    pub fn len(&self) -> usize {
        self.delta.len() + self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// LP column indices, in column layout order.
    fn columns(&self, k: usize) -> Vec<usize> {
        let mut cols: Vec<usize> = self.delta.iter().map(|j| j - 1).collect();
        for &j in &self.beta {
            cols.push(if j == 0 { 2 * k } else { k + j - 1 });
        }
        cols.sort_unstable();
        cols
    }

    fn from_columns(cols: &[usize], k: usize) -> Self {
        let mut s = Support::default();
        for &c in cols {
            if c < k {
                s.delta.push(c + 1);
            } else if c < 2 * k {
                s.beta.push(c - k + 1);
            } else {
                s.beta.push(0);
            }
        }
        s.beta.sort_unstable();
        s
    }
}

/// Complementary-slackness view of a bracket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    pub k: usize,
    pub p: usize,
    pub variant: Variant,
    /// `r_hi`, where the certificate is evaluated.
    #[serde(with = "serde_rational")]
    pub r: Rational,
    /// `false` unless the bracket pins the optimum exactly.
    pub exact: bool,
    /// `{j ≥ 1 : q(j) = 0}`.
    pub value_zeros: Vec<usize>,
    /// `{j ≥ 1 : −q'(j) + r q(j) = 0}`, plus `0` when `q'(0) = 0` (implicit).
    pub slope_zeros: Vec<usize>,
    /// Rank of the vectors `a_j` (`j` in `value_zeros`) and `b_j` (`j` in `slope_zeros`).
    pub rank: usize,
    pub vector_count: usize,
    /// The vectors are linearly independent.
    pub unique: bool,
    /// Nonzero entries of the witness at `r_lo`.
    pub witness_support: Support,
    /// Witness support lies inside the certificate's zero sets.
    pub slackness_holds: bool,
    /// Support of the optimal method as `r_lo → C`, when it can be decided.
    pub limiting_support: Option<Support>,
}

/// Index sets where the dual certificate binds, their rank, and the support
/// of the optimal method.
///
/// For a bracket that is not exact the witness at `r_lo` usually has one
/// extra nonzero. The limiting support drops the unique column whose
/// removal leaves a system `[A_S(r) | b]` that becomes singular inside the
/// bracket.
pub fn support_analysis(bracket: &SspBracket) -> Result<SupportReport, OptimizerError> {
    let witness = match &bracket.primal_at_lo {
        Some(w) if bracket.r_lo.is_positive() => w,
        _ => return Err(no_positive(&bracket.query)),
    };
    let SspQuery { k, p, variant, .. } = bracket.query;
    let q = &bracket.dual_at_hi;
    let r = bracket.r_hi.clone();
    let poly = q.polynomial();
    let dpoly = poly.derivative();

    let mut value_zeros = Vec::new();
    let mut slope_zeros = Vec::new();
    let mut vectors: Vec<Vec<Rational>> = Vec::new();
    if variant == Variant::Implicit && dpoly.eval(&Rational::zero()).is_zero() {
        slope_zeros.push(0);
        vectors.push((0..=p).map(|m| if m == 1 { int(-1) } else { Rational::zero() }).collect());
    }
    for j in 1..=k {
        let x = int(j as i64);
        let v = poly.eval(&x);
        if v.is_zero() {
            value_zeros.push(j);
            vectors.push((0..=p).map(|m| ipow(j as i64, m)).collect());
        }
        if (&r * &v - dpoly.eval(&x)).is_zero() {
            slope_zeros.push(j);
            vectors.push((0..=p).map(|m| crate::order::beta_entry(j as i64, m, &r)).collect());
        }
    }
    let vector_count = vectors.len();
    let rank = if vectors.is_empty() {
        0
    } else {
        let mut m = RationalMatrix::zeros(p + 1, vector_count);
        for (c, v) in vectors.iter().enumerate() {
            for (row, x) in v.iter().enumerate() {
                m.set(row, c, x.clone());
            }
        }
        rank(&m)
    };

    let witness_support = Support::of(witness);
    let slackness_holds = witness_support.delta.iter().all(|j| value_zeros.contains(j))
        && witness_support.beta.iter().all(|j| slope_zeros.contains(j));

    let limiting_support = if bracket.exact || witness_support.len() <= p {
        Some(witness_support.clone())
    } else {
        limiting_support(bracket, &witness_support)?
    };

    Ok(SupportReport {
        k,
        p,
        variant,
        r,
        exact: bracket.exact,
        value_zeros,
        slope_zeros,
        rank,
        vector_count,
        unique: vector_count > 0 && rank == vector_count,
        witness_support,
        slackness_holds,
        limiting_support,
    })
}

fn limiting_support(bracket: &SspBracket, support: &Support) -> Result<Option<Support>, OptimizerError> {
    let SspQuery { k, p, variant, .. } = bracket.query;
    let cols = support.columns(k);
    let lp_lo = build_lp(variant, k, p, &bracket.r_lo)?;
    let lp_hi = build_lp(variant, k, p, &bracket.r_hi)?;
    let det = |lp: &crate::lp::FeasibilityProblem, keep: &[usize]| {
        lp.matrix().select_columns(keep).with_column(lp.rhs()).determinant()
    };
    let mut found = None;
    for drop in 0..cols.len() {
        let keep: Vec<usize> = cols.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &c)| c).collect();
        if keep.len() + 1 != p + 1 {
            return Ok(None);
        }
        let lo = det(&lp_lo, &keep);
        let hi = det(&lp_hi, &keep);
        if !(lo * hi).is_positive() {
            if found.is_some() {
                return Ok(None);
            }
            found = Some(keep);
        }
    }
    Ok(found.map(|keep| Support::from_columns(&keep, k)))
}

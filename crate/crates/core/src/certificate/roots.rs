//! Root structure of certificate polynomials.
//!
//! Integer roots in `[0, k]` are extracted exactly by evaluation and
//! deflation. What remains (the residual factor) is examined with Sturm
//! sequences for exact real-root counts and with companion-matrix
//! eigenvalues for an approximate picture.

use nalgebra::Complex;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::CertificatePolynomial;
use crate::poly::Polynomial;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct RootAnalysis {
    /// Leading coefficient `c`.
    pub leading: Rational,
    pub degree: usize,
    /// Integer roots in `[0, k]` with multiplicities, ascending.
    pub integer_roots: Vec<(usize, usize)>,
    /// `q` divided by `Π (x − λ)^mult` over the integer roots above.
    pub residual: Polynomial,
    /// Real roots of the residual factor, with multiplicity (exact).
    pub residual_real_roots: usize,
    /// Roots of the residual factor, approximate.
    pub approximate_roots: Vec<Complex<f64>>,
    /// `s(j)` for `j = 0..=k`: real roots `≥ j`, with multiplicity.
    pub s_table: Vec<usize>,
}

impl RootAnalysis {
    pub fn multiplicity(&self, j: usize) -> usize {
        self.integer_roots
            .iter()
            .find(|(r, _)| *r == j)
            .map_or(0, |&(_, m)| m)
    }

    /// Sign of `c·(−1)^{s(j)}`: `true` when positive.
    pub fn sign_rule_positive(&self, j: usize) -> bool {
        self.leading.is_positive() == self.s_table[j].is_multiple_of(2)
    }

    /// `Σ 1/(x − λ_m)` over all roots, through the factorization. `x` must not be a root.
    fn log_derivative_at(&self, x: &Rational) -> Rational {
        let mut sum = Rational::zero();
        for &(root, mult) in &self.integer_roots {
            sum += int(mult as i64) / (x - int(root as i64));
        }
        if self.residual.degree().unwrap_or(0) > 0 {
            sum += self.residual.derivative().eval(x) / self.residual.eval(x);
        }
        sum
    }
}

/// Factors out integer roots in `[0, k]` and tabulates `s(j)`.
pub fn analyze_roots(q: &CertificatePolynomial) -> RootAnalysis {
    let poly = q.polynomial();
    let degree = poly.degree().unwrap_or(0);
    let leading = poly.leading().cloned().unwrap_or_else(Rational::zero);
    let mut residual = poly.clone();
    let mut integer_roots = Vec::new();
    for j in 0..=q.k() {
        let x = int(j as i64);
        let mut mult = 0;
        while residual.degree().unwrap_or(0) > 0 && residual.eval(&x).is_zero() {
            residual = residual.deflate(&x).0;
            mult += 1;
        }
        if mult > 0 {
            integer_roots.push((j, mult));
        }
    }
    let residual_real_roots = residual.real_root_count();
    let approximate_roots = residual.approximate_roots();
    let s_table = (0..=q.k())
        .map(|j| {
            let from_ints: usize = integer_roots
                .iter()
                .filter(|(r, _)| *r >= j)
                .map(|(_, m)| m)
                .sum();
            from_ints + residual.real_roots_at_least(&int(j as i64))
        })
        .collect();
    RootAnalysis {
        leading,
        degree,
        integer_roots,
        residual,
        residual_real_roots,
        approximate_roots,
        s_table,
    }
}

/// The four root-form characterizations of the dual sign conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootStatement {
    /// `q(j) ≥ 0` for `j ≥ 1`.
    ValueSign,
    /// `−q'(j) + r q(j) ≥ 0` for `j ≥ 1`, given the value condition.
    SlopeSign,
    /// `q(0) < 0`.
    OriginSign,
    /// `−q'(0) ≥ 0`, given `q(0) < 0`.
    OriginSlope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatementCheck {
    pub statement: RootStatement,
    /// Whether the statement's premise holds (value form).
    pub applicable: bool,
    pub value_form: bool,
    /// `None` when the root form is undefined (a zero root in the
    /// reciprocal sum).
    pub root_form: Option<bool>,
}

impl StatementCheck {
    pub fn agree(&self) -> bool {
        !self.applicable || self.root_form.is_none_or(|rf| rf == self.value_form)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootConditionReport {
    pub j: usize,
    pub checks: Vec<StatementCheck>,
}

impl RootConditionReport {
    pub fn get(&self, s: RootStatement) -> Option<&StatementCheck> {
        self.checks.iter().find(|c| c.statement == s)
    }

    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(StatementCheck::agree)
    }
}

/// Compares each value-form condition at `j` with its root-form counterpart.
/// `j ≥ 1` yields the value and slope statements, `j = 0` the origin ones.
pub fn check_root_conditions(
    q: &CertificatePolynomial,
    analysis: &RootAnalysis,
    j: usize,
) -> RootConditionReport {
    assert!(j <= q.k(), "j = {j} outside 0..=k");
    let poly = q.polynomial();
    let x = int(j as i64);
    let value = poly.eval(&x);
    let deriv = poly.derivative().eval(&x);
    let mult = analysis.multiplicity(j);
    let mut checks = Vec::with_capacity(2);

    if j >= 1 {
        let value_ok = !value.is_negative();
        checks.push(StatementCheck {
            statement: RootStatement::ValueSign,
            applicable: true,
            value_form: value_ok,
            root_form: Some(mult > 0 || analysis.sign_rule_positive(j)),
        });
        let slope_ok = !(&q.r * &value - &deriv).is_negative();
        let root_form = match mult {
            0 => analysis.log_derivative_at(&x) <= *q.r(),
            1 => analysis.sign_rule_positive(j),
            _ => true,
        };
        checks.push(StatementCheck {
            statement: RootStatement::SlopeSign,
            applicable: value_ok,
            value_form: slope_ok,
            root_form: Some(root_form),
        });
    } else {
        let origin_ok = value.is_negative();
        checks.push(StatementCheck {
            statement: RootStatement::OriginSign,
            applicable: true,
            value_form: origin_ok,
            root_form: Some(mult == 0 && !analysis.sign_rule_positive(0)),
        });
        // Σ 1/λ_m = −q'(0)/q(0) when 0 is not a root.
        let root_form = (mult == 0).then(|| -analysis.log_derivative_at(&x) <= Rational::zero());
        checks.push(StatementCheck {
            statement: RootStatement::OriginSlope,
            applicable: origin_ok,
            value_form: !deriv.is_positive(),
            root_form,
        });
    }
    RootConditionReport { j, checks }
}

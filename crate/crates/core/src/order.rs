//! Order conditions, the primal feasibility LPs and the SSP threshold factor.
//!
//! Column layout of every LP built here: `δ_1..δ_k`, then `β_1..β_k`, then
//! (implicit only) `β_0`. Row `m` for `m = 0..=p` is the order-`m` condition,
//! so a Farkas vector `y` reads directly as polynomial coefficients `y_m`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::FeasibilityProblem;
use crate::rational::{int, ipow, serde_rational, serde_rational_vec, Rational, RationalMatrix};

/// Explicit (`β_0 = 0`) or implicit linear multistep methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Explicit,
    Implicit,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Explicit => "explicit",
            Variant::Implicit => "implicit",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "explicit" | "exp" => Ok(Variant::Explicit),
            "implicit" | "imp" => Ok(Variant::Implicit),
            other => Err(format!("unknown variant {other:?} (expected explicit or implicit)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("step count must be at least 1 (got {0})")]
    InvalidSteps(usize),
    #[error("order must be at least 1 (got {0})")]
    InvalidOrder(usize),
    #[error("r must be nonnegative (got {0})")]
    NegativeR(Rational),
    #[error("{what} has {got} entries, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("explicit method with nonzero beta_0 = {0}")]
    ExplicitBeta0(Rational),
}

/// `u_n = Σ_{j=1..k} α_j u_{n-j} + h Σ_{j=0..k} β_j f(u_{n-j})`.
///
/// `alpha[j-1]` holds `α_j`; `beta[j]` holds `β_j` including `β_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodCoefficients {
    pub k: usize,
    pub explicit: bool,
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub beta: Vec<Rational>,
}

impl MethodCoefficients {
    pub fn new(
        k: usize,
        explicit: bool,
        alpha: Vec<Rational>,
        beta: Vec<Rational>,
    ) -> Result<Self, OrderError> {
        let m = Self {
            k,
            explicit,
            alpha,
            beta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), OrderError> {
        if self.k == 0 {
            return Err(OrderError::InvalidSteps(0));
        }
        if self.alpha.len() != self.k {
            return Err(OrderError::Length {
                what: "alpha",
                got: self.alpha.len(),
                expected: self.k,
            });
        }
        if self.beta.len() != self.k + 1 {
            return Err(OrderError::Length {
                what: "beta",
                got: self.beta.len(),
                expected: self.k + 1,
            });
        }
        if self.explicit && !self.beta[0].is_zero() {
            return Err(OrderError::ExplicitBeta0(self.beta[0].clone()));
        }
        Ok(())
    }

    pub fn forward_euler() -> Self {
        Self {
            k: 1,
            explicit: true,
            alpha: vec![int(1)],
            beta: vec![int(0), int(1)],
        }
    }

    pub fn backward_euler() -> Self {
        Self {
            k: 1,
            explicit: false,
            alpha: vec![int(1)],
            beta: vec![int(1), int(0)],
        }
    }

    pub fn alpha_j(&self, j: usize) -> &Rational {
        &self.alpha[j - 1]
    }

    pub fn variant(&self) -> Variant {
        if self.explicit {
            Variant::Explicit
        } else {
            Variant::Implicit
        }
    }
}

/// Nonnegative `(δ, β)` solving the explicit or implicit feasibility LP at `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimalWitness {
    pub variant: Variant,
    pub k: usize,
    pub p: usize,
    #[serde(with = "serde_rational")]
    pub r: Rational,
    /// `δ_1..δ_k`.
    #[serde(with = "serde_rational_vec")]
    pub delta: Vec<Rational>,
    /// `β_0..β_k`; `β_0` is always zero for the explicit variant.
    #[serde(with = "serde_rational_vec")]
    pub beta: Vec<Rational>,
}

impl PrimalWitness {
    /// Maps an LP solution vector (in column layout order) to a witness.
    pub fn from_lp_solution(variant: Variant, k: usize, p: usize, r: Rational, x: &[Rational]) -> Self {
        let delta = x[..k].to_vec();
        let mut beta = Vec::with_capacity(k + 1);
        beta.push(match variant {
            Variant::Explicit => Rational::zero(),
            Variant::Implicit => x[2 * k].clone(),
        });
        beta.extend_from_slice(&x[k..2 * k]);
        Self {
            variant,
            k,
            p,
            r,
            delta,
            beta,
        }
    }

    /// The LP solution vector in column layout order.
    pub fn to_lp_solution(&self) -> Vec<Rational> {
        let mut x = self.delta.clone();
        x.extend_from_slice(&self.beta[1..]);
        if self.variant == Variant::Implicit {
            x.push(self.beta[0].clone());
        }
        x
    }

    /// Nonnegativity plus the LP equalities, in exact arithmetic.
    pub fn verify(&self) -> bool {
        if self.delta.len() != self.k || self.beta.len() != self.k + 1 {
            return false;
        }
        if self.variant == Variant::Explicit && !self.beta[0].is_zero() {
            return false;
        }
        match build_lp(self.variant, self.k, self.p, &self.r) {
            Ok(lp) => lp.is_witness(&self.to_lp_solution()),
            Err(_) => false,
        }
    }
}

/// The SSP coefficient of a single method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdFactor {
    Finite(Rational),
    /// All of `β_1..β_k` vanish and no coefficient is negative.
    Unbounded,
}

impl ThresholdFactor {
    /// `self ≥ r`, with `Unbounded` dominating every rational.
    pub fn at_least(&self, r: &Rational) -> bool {
        match self {
            ThresholdFactor::Finite(c) => c >= r,
            ThresholdFactor::Unbounded => true,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ThresholdFactor::Finite(c) => crate::rational::to_f64(c),
            ThresholdFactor::Unbounded => f64::INFINITY,
        }
    }
}

impl fmt::Display for ThresholdFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdFactor::Finite(c) => write!(f, "{c}"),
            ThresholdFactor::Unbounded => f.write_str("unbounded"),
        }
    }
}

fn check_lp_args(k: usize, p: usize, r: &Rational) -> Result<(), OrderError> {
    if k == 0 {
        return Err(OrderError::InvalidSteps(k));
    }
    if p == 0 {
        return Err(OrderError::InvalidOrder(p));
    }
    if r.is_negative() {
        return Err(OrderError::NegativeR(r.clone()));
    }
    Ok(())
}

/// Coefficient of `β_j` (`j ≥ 1`) in order row `m`: `r j^m − m j^(m−1)`.
pub(crate) fn beta_entry(j: i64, m: usize, r: &Rational) -> Rational {
    let mut v = r * ipow(j, m);
    if m > 0 {
        v -= int(m as i64) * ipow(j, m - 1);
    }
    v
}

/// Feasibility LP for explicit `k`-step order-`p` methods with SSP coefficient `≥ r`.
pub fn build_explicit_lp(k: usize, p: usize, r: &Rational) -> Result<FeasibilityProblem, OrderError> {
    build_lp(Variant::Explicit, k, p, r)
}

/// As [`build_explicit_lp`] plus a trailing `β_0` column.
pub fn build_implicit_lp(k: usize, p: usize, r: &Rational) -> Result<FeasibilityProblem, OrderError> {
    build_lp(Variant::Implicit, k, p, r)
}

pub fn build_lp(
    variant: Variant,
    k: usize,
    p: usize,
    r: &Rational,
) -> Result<FeasibilityProblem, OrderError> {
    check_lp_args(k, p, r)?;
    let cols = match variant {
        Variant::Explicit => 2 * k,
        Variant::Implicit => 2 * k + 1,
    };
    let mut a = RationalMatrix::zeros(p + 1, cols);
    for m in 0..=p {
        for j in 1..=k {
            a.set(m, j - 1, ipow(j as i64, m));
            a.set(m, k + j - 1, beta_entry(j as i64, m, r));
        }
        if variant == Variant::Implicit && m == 1 {
            // −m·0^(m−1): only the m = 1 row survives.
            a.set(m, 2 * k, int(-1));
        }
    }
    let b = (0..=p).map(|m| ipow(0, m)).collect();
    Ok(FeasibilityProblem::new(a, b).expect("shapes agree by construction"))
}

/// Residuals of the order conditions `m = 0..=p`; all zero iff order ≥ `p`.
pub fn order_residuals(method: &MethodCoefficients, p: usize) -> Vec<Rational> {
    let k = method.k;
    let mut out = Vec::with_capacity(p + 1);
    let sum_alpha = method.alpha.iter().fold(Rational::zero(), |acc, a| acc + a);
    out.push(sum_alpha - int(1));
    for m in 1..=p {
        let mut res = Rational::zero();
        for j in 1..=k {
            let jj = j as i64;
            res += ipow(jj, m) * method.alpha_j(j);
            res -= int(m as i64) * ipow(jj, m - 1) * &method.beta[j];
        }
        res -= int(m as i64) * ipow(0, m - 1) * &method.beta[0];
        out.push(res);
    }
    out
}

/// Largest `C` with `h ≤ C·h_FE` guaranteeing monotonicity; zero if any
/// coefficient is negative.
pub fn threshold_factor(method: &MethodCoefficients) -> ThresholdFactor {
    if method.alpha.iter().any(Signed::is_negative) || method.beta.iter().any(Signed::is_negative) {
        return ThresholdFactor::Finite(Rational::zero());
    }
    (1..=method.k)
        .filter(|&j| !method.beta[j].is_zero())
        .map(|j| method.alpha_j(j) / &method.beta[j])
        .min()
        .map_or(ThresholdFactor::Unbounded, ThresholdFactor::Finite)
}

/// `α_j = δ_j + r β_j`.
pub fn witness_to_method(witness: &PrimalWitness) -> MethodCoefficients {
    let alpha = (1..=witness.k)
        .map(|j| &witness.delta[j - 1] + &witness.r * &witness.beta[j])
        .collect();
    MethodCoefficients {
        k: witness.k,
        explicit: witness.variant == Variant::Explicit,
        alpha,
        beta: witness.beta.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_feasibility, FeasibilityOutcome};
    use crate::rational::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn explicit_lp_k1_p1() {
        let lp = build_explicit_lp(1, 1, &int(0)).unwrap();
        assert_eq!(lp.matrix(), &RationalMatrix::from_i64_rows(&[&[1, 0], &[1, -1]]).unwrap());
        assert_eq!(lp.rhs(), &ints(&[1, 0])[..]);

        let lp = build_explicit_lp(1, 1, &int(1)).unwrap();
        assert_eq!(lp.matrix(), &RationalMatrix::from_i64_rows(&[&[1, 1], &[1, 0]]).unwrap());
    }

    #[test]
    fn forward_euler_is_the_k1_p1_witness() {
        let lp = build_explicit_lp(1, 1, &int(1)).unwrap();
        match solve_feasibility(&lp) {
            FeasibilityOutcome::Feasible { x } => assert_eq!(x, ints(&[0, 1])),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn rhs_is_unit_vector() {
        for p in 1..6 {
            let lp = build_explicit_lp(3, p, &rat(1, 3)).unwrap();
            assert_eq!(lp.matrix().rows(), p + 1);
            let mut expect = vec![int(0); p + 1];
            expect[0] = int(1);
            assert_eq!(lp.rhs(), &expect[..]);
        }
    }

    #[test]
    fn implicit_beta0_column() {
        let lp = build_implicit_lp(1, 2, &int(2)).unwrap();
        assert_eq!(lp.matrix().cols(), 3);
        assert_eq!(lp.matrix().column(2), ints(&[0, -1, 0]));
        assert_eq!(lp.rhs(), &ints(&[1, 0, 0])[..]);
    }

    #[test]
    fn implicit_k1_p2_r2_is_feasible() {
        // δ_1 + 2β_1 = 1, δ_1 + β_1 − β_0 = 0, δ_1 + 0·β_1 = 0 → δ=0, β_1=β_0=1/2.
        let lp = build_implicit_lp(1, 2, &int(2)).unwrap();
        match solve_feasibility(&lp) {
            FeasibilityOutcome::Feasible { x } => {
                assert_eq!(x, vec![int(0), rat(1, 2), rat(1, 2)]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert_eq!(build_explicit_lp(0, 1, &int(0)).unwrap_err(), OrderError::InvalidSteps(0));
        assert_eq!(build_explicit_lp(1, 0, &int(0)).unwrap_err(), OrderError::InvalidOrder(0));
        assert!(matches!(
            build_implicit_lp(1, 1, &int(-1)).unwrap_err(),
            OrderError::NegativeR(_)
        ));
    }

    #[test]
    fn euler_residuals() {
        let fe = MethodCoefficients::forward_euler();
        assert_eq!(order_residuals(&fe, 1), ints(&[0, 0]));
        assert_eq!(order_residuals(&fe, 2), ints(&[0, 0, -1]));
        let be = MethodCoefficients::backward_euler();
        assert_eq!(order_residuals(&be, 1), ints(&[0, 0]));
    }

    #[test]
    fn inconsistent_alpha_sum() {
        let m = MethodCoefficients::new(2, true, ints(&[1, 1]), ints(&[0, 1, 0])).unwrap();
        assert_eq!(order_residuals(&m, 1)[0], int(1));
    }

    #[test]
    fn threshold_factor_cases() {
        assert_eq!(
            threshold_factor(&MethodCoefficients::forward_euler()),
            ThresholdFactor::Finite(int(1))
        );
        let neg = MethodCoefficients::new(2, true, ints(&[1, 0]), ints(&[0, 1, -1])).unwrap();
        assert_eq!(threshold_factor(&neg), ThresholdFactor::Finite(int(0)));
        let half = MethodCoefficients::new(2, true, ints(&[1, 0]), ints(&[0, 2, 0])).unwrap();
        assert_eq!(threshold_factor(&half), ThresholdFactor::Finite(rat(1, 2)));
        assert_eq!(
            threshold_factor(&MethodCoefficients::backward_euler()),
            ThresholdFactor::Unbounded
        );
    }

    #[test]
    fn method_validation() {
        assert!(MethodCoefficients::new(2, true, ints(&[1]), ints(&[0, 1, 0])).is_err());
        assert!(MethodCoefficients::new(1, true, ints(&[1]), ints(&[1, 1])).is_err());
        assert!(MethodCoefficients::new(0, true, vec![], ints(&[0])).is_err());
    }

    #[test]
    fn witness_maps_to_method() {
        let w = PrimalWitness {
            variant: Variant::Explicit,
            k: 1,
            p: 1,
            r: int(1),
            delta: ints(&[0]),
            beta: ints(&[0, 1]),
        };
        assert!(w.verify());
        assert_eq!(witness_to_method(&w), MethodCoefficients::forward_euler());

        let w0 = PrimalWitness {
            variant: Variant::Explicit,
            k: 2,
            p: 1,
            r: int(0),
            delta: vec![rat(1, 2), rat(1, 2)],
            beta: vec![int(0), int(1), rat(1, 2)],
        };
        assert_eq!(witness_to_method(&w0).alpha, w0.delta);
    }

    #[test]
    fn method_json_uses_fraction_strings() {
        let m = MethodCoefficients::new(2, true, vec![rat(3, 4), rat(1, 4)], vec![int(0), rat(3, 2), int(0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"k":2,"explicit":true,"alpha":["3/4","1/4"],"beta":["0","3/2","0"]}"#);
        let back: MethodCoefficients = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}

//! Dual polynomial certificates.
//!
//! A certificate is a polynomial `q` of degree at most `p` together with the
//! step count `k`, the SSP level `r` it speaks about, and which dual system
//! it claims to satisfy:
//!
//! | system            | conditions                                                   |
//! |-------------------|--------------------------------------------------------------|
//! | `OpenExplicit`    | `q(j) ≥ 0`, `−q'(j) + r q(j) ≥ 0` for `j = 1..k`; `q(0) < 0`   |
//! | `OpenImplicit`    | as above, plus `−q'(0) ≥ 0`                                  |
//! | `ClosedExplicit`  | `q(j) ≥ 0`, `−q'(j) + r q(j) ≥ 0` for `j = 1..k`; `q(0) = 0`   |
//! | `ClosedImplicit`  | as above, plus `q'(0) = 0`                                   |
//!
//! An open certificate at `r` proves the feasibility LP infeasible at `r`,
//! so the optimal SSP coefficient is below `r`. A closed certificate at `r`
//! proves the optimum is at most `r`.
//!
//! Every verdict is computed from exact values of `q` and `q'`; the root
//! analysis in [`roots`] is a cross-check and reporting layer.

mod audit;
mod format;
mod roots;

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

pub use audit::{structural_audit, AuditCheck, AuditProperty, AuditReport};
pub use format::{parse_certificate, write_certificate, CertificateParseError};
pub use roots::{analyze_roots, check_root_conditions, RootAnalysis, RootConditionReport, RootStatement, StatementCheck};

use crate::order::Variant;
use crate::poly::Polynomial;
use crate::rational::{int, Rational};

/// Which dual system a certificate claims to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualSystem {
    OpenExplicit,
    OpenImplicit,
    ClosedExplicit,
    ClosedImplicit,
}

impl DualSystem {
    pub fn open(variant: Variant) -> Self {
        match variant {
            Variant::Explicit => DualSystem::OpenExplicit,
            Variant::Implicit => DualSystem::OpenImplicit,
        }
    }

    pub fn closed(variant: Variant) -> Self {
        match variant {
            Variant::Explicit => DualSystem::ClosedExplicit,
            Variant::Implicit => DualSystem::ClosedImplicit,
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            DualSystem::OpenExplicit | DualSystem::ClosedExplicit => Variant::Explicit,
            DualSystem::OpenImplicit | DualSystem::ClosedImplicit => Variant::Implicit,
        }
    }

    pub fn is_closed(self) -> bool {
        matches!(self, DualSystem::ClosedExplicit | DualSystem::ClosedImplicit)
    }

    pub fn tag(self) -> &'static str {
        match self {
            DualSystem::OpenExplicit => "open-explicit",
            DualSystem::OpenImplicit => "open-implicit",
            DualSystem::ClosedExplicit => "closed-explicit",
            DualSystem::ClosedImplicit => "closed-implicit",
        }
    }
}

impl fmt::Display for DualSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DualSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            DualSystem::OpenExplicit,
            DualSystem::OpenImplicit,
            DualSystem::ClosedExplicit,
            DualSystem::ClosedImplicit,
        ]
        .into_iter()
        .find(|d| d.tag() == s.trim())
        .ok_or_else(|| format!("unknown dual system {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("certificate polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial of degree {degree} exceeds the order bound p = {p}")]
    DegreeExceeds { degree: usize, p: usize },
    #[error("step count must be at least 1")]
    InvalidSteps,
    #[error("order must be at least {min} for this construction (got {p})")]
    OrderTooLow { p: usize, min: usize },
    #[error("expected a {expected} certificate, got {got}")]
    WrongSystem { expected: DualSystem, got: DualSystem },
    #[error("certificate does not verify: {0}")]
    NotVerified(String),
}

/// Polynomial `q = y_0 + y_1 x + … + y_p x^p` tagged with its claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificatePolynomial {
    poly: Polynomial,
    p: usize,
    k: usize,
    r: Rational,
    system: DualSystem,
}

impl CertificatePolynomial {
    /// Coefficients `y_0..y_p`; the order bound `p` is `coefficients.len() - 1`.
    pub fn new(
        coefficients: Vec<Rational>,
        k: usize,
        r: Rational,
        system: DualSystem,
    ) -> Result<Self, CertificateError> {
        let p = coefficients.len().saturating_sub(1);
        Self::from_polynomial(Polynomial::new(coefficients), p, k, r, system)
    }

    pub fn from_polynomial(
        poly: Polynomial,
        p: usize,
        k: usize,
        r: Rational,
        system: DualSystem,
    ) -> Result<Self, CertificateError> {
        if k == 0 {
            return Err(CertificateError::InvalidSteps);
        }
        let degree = poly.degree().ok_or(CertificateError::ZeroPolynomial)?;
        if degree > p {
            return Err(CertificateError::DegreeExceeds { degree, p });
        }
        Ok(Self {
            poly,
            p,
            k,
            r,
            system,
        })
    }

    /// Reads a Farkas vector of the feasibility LP as an open-system certificate.
    pub fn from_farkas(
        variant: Variant,
        k: usize,
        r: Rational,
        y: Vec<Rational>,
    ) -> Result<Self, CertificateError> {
        Self::new(y, k, r, DualSystem::open(variant))
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    /// `y_0..y_p`, zero-padded.
    pub fn coefficients(&self) -> Vec<Rational> {
        self.poly.padded(self.p + 1)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn system(&self) -> DualSystem {
        self.system
    }

    /// Same polynomial with a different claim.
    pub fn retarget(&self, k: usize, r: Rational, system: DualSystem) -> Self {
        Self {
            poly: self.poly.clone(),
            p: self.p,
            k,
            r,
            system,
        }
    }

    /// `−q'(x) + r·q(x)` as a polynomial.
    pub fn slope_polynomial(&self) -> Polynomial {
        &self.poly.scale(&self.r) - &self.poly.derivative()
    }
}

impl fmt::Display for CertificatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q(x) = {} [{} k={} p={} r={}]",
            self.poly, self.system, self.k, self.p, self.r
        )
    }
}

/// Which inequality of the dual system a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConditionKind {
    /// `q(j) ≥ 0`.
    Value { j: usize },
    /// `−q'(j) + r q(j) ≥ 0`.
    Slope { j: usize },
    /// `q(0) < 0` (open) or `q(0) = 0` (closed).
    Origin,
    /// `−q'(0) ≥ 0` (open implicit) or `q'(0) = 0` (closed implicit).
    OriginSlope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    #[serde(flatten)]
    pub kind: ConditionKind,
    pub label: String,
    #[serde(serialize_with = "crate::rational::serde_rational::serialize")]
    pub value: Rational,
    pub holds: bool,
}

impl fmt::Display for ConditionCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}  (value {})",
            if self.holds { "ok" } else { "FAIL" },
            self.label,
            self.value
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub system: DualSystem,
    pub conditions: Vec<ConditionCheck>,
    pub verdict: bool,
}

impl CertificateReport {
    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.conditions.iter().filter(|c| !c.holds)
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            writeln!(f, "{c}")?;
        }
        write!(f, "verdict: {}", if self.verdict { "VALID" } else { "INVALID" })
    }
}

/// Evaluates every condition of the certificate's dual system exactly.
pub fn verify_certificate(q: &CertificatePolynomial) -> CertificateReport {
    let poly = &q.poly;
    let dpoly = poly.derivative();
    let mut conditions = Vec::with_capacity(2 * q.k + 2);
    for j in 1..=q.k {
        let x = int(j as i64);
        let value = poly.eval(&x);
        let slope = &q.r * &value - dpoly.eval(&x);
        conditions.push(ConditionCheck {
            kind: ConditionKind::Value { j },
            label: format!("q({j}) >= 0"),
            holds: !value.is_negative(),
            value,
        });
        conditions.push(ConditionCheck {
            kind: ConditionKind::Slope { j },
            label: format!("-q'({j}) + r*q({j}) >= 0"),
            holds: !slope.is_negative(),
            value: slope,
        });
    }
    let q0 = poly.coeff(0);
    let dq0 = poly.coeff(1);
    if q.system.is_closed() {
        conditions.push(ConditionCheck {
            kind: ConditionKind::Origin,
            label: "q(0) = 0".into(),
            holds: q0.is_zero(),
            value: q0,
        });
    } else {
        conditions.push(ConditionCheck {
            kind: ConditionKind::Origin,
            label: "q(0) < 0".into(),
            holds: q0.is_negative(),
            value: q0,
        });
    }
    match q.system {
        DualSystem::OpenImplicit => conditions.push(ConditionCheck {
            kind: ConditionKind::OriginSlope,
            label: "-q'(0) >= 0".into(),
            holds: !dq0.is_positive(),
            value: -dq0,
        }),
        DualSystem::ClosedImplicit => conditions.push(ConditionCheck {
            kind: ConditionKind::OriginSlope,
            label: "q'(0) = 0".into(),
            holds: dq0.is_zero(),
            value: dq0,
        }),
        _ => {}
    }
    let verdict = !poly.is_zero() && conditions.iter().all(|c| c.holds);
    CertificateReport {
        system: q.system,
        conditions,
        verdict,
    }
}

/// `x(k − x)^(p−1)`, a closed explicit certificate at the classical bound.
pub fn canonical_explicit_bound_certificate(
    k: usize,
    p: usize,
) -> Result<CertificatePolynomial, CertificateError> {
    if k == 0 {
        return Err(CertificateError::InvalidSteps);
    }
    if p == 0 {
        return Err(CertificateError::OrderTooLow { p, min: 1 });
    }
    let ki = k as i64;
    let r = if k == 1 {
        if p == 1 {
            int(1)
        } else {
            int(0)
        }
    } else if p <= k {
        Rational::new(((k - p) as i64).into(), ((k - 1) as i64).into())
    } else {
        int(0)
    };
    let poly = &Polynomial::from_i64(&[0, 1]) * &Polynomial::from_i64(&[ki, -1]).pow(p - 1);
    CertificatePolynomial::from_polynomial(poly, p, k, r, DualSystem::ClosedExplicit)
}

/// `x²(k − x)^(p−2)`, a closed implicit certificate at the sharpened bound.
pub fn canonical_implicit_bound_certificate(
    k: usize,
    p: usize,
) -> Result<CertificatePolynomial, CertificateError> {
    if k == 0 {
        return Err(CertificateError::InvalidSteps);
    }
    if p < 2 {
        return Err(CertificateError::OrderTooLow { p, min: 2 });
    }
    let ki = k as i64;
    let r = if k == 1 {
        if p == 2 {
            int(2)
        } else {
            int(0)
        }
    } else if p <= 2 * k {
        Rational::new(((2 * k - p) as i64).into(), ((k - 1) as i64).into())
    } else {
        int(0)
    };
    let poly = &Polynomial::from_i64(&[0, 0, 1]) * &Polynomial::from_i64(&[ki, -1]).pow(p - 2);
    CertificatePolynomial::from_polynomial(poly, p, k, r, DualSystem::ClosedImplicit)
}

/// `q ↦ q²`: a verified closed explicit certificate at `r` becomes a closed
/// implicit certificate of order `2p` at `2r`.
pub fn square_certificate(
    q: &CertificatePolynomial,
) -> Result<CertificatePolynomial, CertificateError> {
    if q.system != DualSystem::ClosedExplicit {
        return Err(CertificateError::WrongSystem {
            expected: DualSystem::ClosedExplicit,
            got: q.system,
        });
    }
    let report = verify_certificate(q);
    if !report.verdict {
        let failed: Vec<String> = report.failures().map(|c| c.label.clone()).collect();
        return Err(CertificateError::NotVerified(failed.join(", ")));
    }
    let sq = &q.poly * &q.poly;
    CertificatePolynomial::from_polynomial(
        sq,
        2 * q.p,
        q.k,
        int(2) * &q.r,
        DualSystem::ClosedImplicit,
    )
}

/// `q ↦ q − q(0)`: a verified open explicit certificate at `r ≥ 0` becomes a
/// closed explicit certificate at the same `r`.
pub fn close_certificate(
    q: &CertificatePolynomial,
) -> Result<CertificatePolynomial, CertificateError> {
    if q.system != DualSystem::OpenExplicit {
        return Err(CertificateError::WrongSystem {
            expected: DualSystem::OpenExplicit,
            got: q.system,
        });
    }
    if !verify_certificate(q).verdict || q.r.is_negative() {
        return Err(CertificateError::NotVerified(q.to_string()));
    }
    let shifted = &q.poly - &Polynomial::constant(q.poly.coeff(0));
    CertificatePolynomial::from_polynomial(
        shifted,
        q.p,
        q.k,
        q.r.clone(),
        DualSystem::ClosedExplicit,
    )
}

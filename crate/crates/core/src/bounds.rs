//! Closed-form upper bounds, the existence threshold and the
//! implicit/explicit comparison.

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::certificate::{
    canonical_explicit_bound_certificate, canonical_implicit_bound_certificate, close_certificate,
    square_certificate, verify_certificate, CertificateError, CertificatePolynomial,
};
use crate::optimizer::SspBracket;
use crate::order::Variant;
use crate::rational::{int, serde_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error("bracket for {got} does not match the expected query {expected}")]
    MismatchedQuery { expected: String, got: String },
}

/// A closed-form bound on the optimal SSP coefficient and the closed
/// certificate proving it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub p: usize,
    pub variant: Variant,
    #[serde(with = "serde_rational")]
    pub bound_value: Rational,
    #[serde(skip)]
    pub certificate: CertificatePolynomial,
}

/// `(k − p)/(k − 1)` for `p ≤ k`, `0` for `p > k`, `1` for `k = p = 1`.
pub fn upper_bound_explicit(k: usize, p: usize) -> Result<BoundReport, BoundsError> {
    let certificate = canonical_explicit_bound_certificate(k, p)?;
    Ok(BoundReport {
        k,
        p,
        variant: Variant::Explicit,
        bound_value: certificate.r().clone(),
        certificate,
    })
}

/// `(2k − p)/(k − 1)` for `p ≤ 2k`, `0` for `p > 2k`, `2` for `(k, p) = (1, 2)`.
/// Requires `p ≥ 2`.
pub fn upper_bound_implicit(k: usize, p: usize) -> Result<BoundReport, BoundsError> {
    let certificate = canonical_implicit_bound_certificate(k, p)?;
    Ok(BoundReport {
        k,
        p,
        variant: Variant::Implicit,
        bound_value: certificate.r().clone(),
        certificate,
    })
}

pub fn upper_bound(variant: Variant, k: usize, p: usize) -> Result<BoundReport, BoundsError> {
    match variant {
        Variant::Explicit => upper_bound_explicit(k, p),
        Variant::Implicit => upper_bound_implicit(k, p),
    }
}

/// Smallest `k` with `k² > p²(p² − 1)/6 · ⌊(p + 2)/2⌋`; explicit order-`p`
/// methods with positive SSP coefficient exist for every `k` from here on.
pub fn existence_step_threshold(p: usize) -> usize {
    let p = p as u128;
    let radicand = p * p * (p * p - 1) / 6 * ((p + 2) / 2);
    let mut k = radicand.isqrt();
    while k * k <= radicand {
        k += 1;
    }
    k as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpExpReport {
    pub k: usize,
    pub p: usize,
    /// `c_imp(k, 2p).r_lo ≤ 2·c_exp(k, p).r_hi`.
    pub holds: bool,
    /// `2·c_exp.r_hi − c_imp.r_lo`.
    #[serde(with = "serde_rational")]
    pub margin: Rational,
    /// Sum of both bracket tolerances; the theorem relates true optima.
    #[serde(with = "serde_rational")]
    pub slack: Rational,
    /// Whether the squared explicit certificate verifies as closed implicit at `2·r_hi`.
    pub squared_certificate_verified: bool,
    #[serde(skip)]
    pub squared_certificate: Option<CertificatePolynomial>,
}

/// Compares `C_imp(k, 2p)` with `2·C_exp(k, p)` at bracket resolution and
/// rebuilds the implication by squaring the explicit certificate.
pub fn check_impexp_relation(
    k: usize,
    p: usize,
    c_exp: &SspBracket,
    c_imp: &SspBracket,
) -> Result<ImpExpReport, BoundsError> {
    let want = |variant, kk, pp, b: &SspBracket| {
        let q = &b.query;
        if q.k != kk || q.p != pp || q.variant != variant {
            Err(BoundsError::MismatchedQuery {
                expected: format!("{variant} k={kk} p={pp}"),
                got: format!("{} k={} p={}", q.variant, q.k, q.p),
            })
        } else {
            Ok(())
        }
    };
    want(Variant::Explicit, k, p, c_exp)?;
    want(Variant::Implicit, k, 2 * p, c_imp)?;

    let twice = int(2) * &c_exp.r_hi;
    let margin = &twice - &c_imp.r_lo;
    let slack = &c_exp.query.tolerance + &c_imp.query.tolerance;

    // The open certificate at r_hi closes to a closed one at r_hi, whose
    // square is closed implicit at 2·r_hi.
    let squared = close_certificate(&c_exp.dual_at_hi)
        .and_then(|closed| square_certificate(&closed))
        .ok();
    let squared_certificate_verified = squared
        .as_ref()
        .is_some_and(|sq| sq.r() == &twice && verify_certificate(sq).verdict);

    Ok(ImpExpReport {
        k,
        p,
        holds: !margin.is_negative(),
        margin,
        slack,
        squared_certificate_verified,
        squared_certificate: squared,
    })
}

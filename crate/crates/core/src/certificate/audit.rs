//! Structural properties expected of certificates at the exact optimum.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::roots::analyze_roots;
use super::CertificatePolynomial;
use crate::order::Variant;
use crate::rational::{int, rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditProperty {
    /// Degree is exactly `p`.
    Degree,
    /// Real parts of the nonzero roots lie in `[1, k]`.
    RootRealParts,
    /// Every real root is an integer in `[0, k]`.
    IntegerRealRoots,
    /// `0` is simple (explicit) or double (implicit); interior roots are double.
    InteriorMultiplicities,
    /// Multiplicity of `k`, by the parity of `p`.
    EndpointMultiplicity,
    /// `q ≥ 0` on `[0, k]`.
    Nonnegative,
    /// `q(0) = 0`, and `q'(0) = 0` for implicit.
    ClosedAtOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditCheck {
    pub property: AuditProperty,
    pub holds: bool,
    /// `false` when the verdict rests on floating-point roots or sampling.
    pub exact: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub variant: Variant,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, property: AuditProperty) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:?}{}: {}",
                if c.holds { "ok" } else { "FAIL" },
                c.property,
                if c.exact { "" } else { " (approx)" },
                c.detail
            )?;
        }
        write!(f, "audit: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

const ROOT_TOL: f64 = 1e-9;

/// Checks the root-pattern properties of an optimal certificate.
pub fn structural_audit(q: &CertificatePolynomial, variant: Variant) -> AuditReport {
    let a = analyze_roots(q);
    let k = q.k();
    let p = q.p();
    let poly = q.polynomial();
    let mut checks = Vec::new();
    let mut push = |property, holds, exact, detail: String| {
        checks.push(AuditCheck {
            property,
            holds,
            exact,
            detail,
        })
    };

    push(
        AuditProperty::Degree,
        a.degree == p,
        true,
        format!("degree {} with p = {p}", a.degree),
    );

    let stray: Vec<String> = a
        .approximate_roots
        .iter()
        .filter(|z| z.re < 1.0 - ROOT_TOL || z.re > k as f64 + ROOT_TOL)
        .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
        .collect();
    push(
        AuditProperty::RootRealParts,
        stray.is_empty(),
        a.residual.degree().unwrap_or(0) == 0,
        if stray.is_empty() {
            "all nonzero roots have real part in [1, k]".into()
        } else {
            format!("outside [1, k]: {}", stray.join(", "))
        },
    );

    push(
        AuditProperty::IntegerRealRoots,
        a.residual_real_roots == 0,
        true,
        format!(
            "integer roots {:?}, {} other real root(s)",
            a.integer_roots, a.residual_real_roots
        ),
    );

    let zero_mult = match variant {
        Variant::Explicit => 1,
        Variant::Implicit => 2,
    };
    let bad_interior: Vec<usize> = (1..k).filter(|&j| !matches!(a.multiplicity(j), 0 | 2)).collect();
    push(
        AuditProperty::InteriorMultiplicities,
        a.multiplicity(0) == zero_mult && bad_interior.is_empty(),
        true,
        format!(
            "root 0 has multiplicity {} (want {zero_mult}); bad interior roots {bad_interior:?}",
            a.multiplicity(0)
        ),
    );

    // Explicit: even p forces a simple root at k. Implicit swaps the parities.
    let simple_at_k = p.is_multiple_of(2) == (variant == Variant::Explicit);
    let mk = a.multiplicity(k);
    let (endpoint_ok, want) = if simple_at_k {
        (mk == 1, "1")
    } else {
        (matches!(mk, 0 | 2), "0 or 2")
    };
    push(
        AuditProperty::EndpointMultiplicity,
        endpoint_ok,
        true,
        format!("root {k} has multiplicity {mk} (want {want})"),
    );

    // With no non-integer real root in [0, k], q keeps its sign between
    // consecutive integers, so half-integer samples decide nonnegativity.
    let residual_in_range = a.residual.real_roots_at_least(&int(0)) - a.residual.real_roots_at_least(&int(k as i64));
    let half_ok = (0..=2 * k).all(|i| !poly.eval(&rat(i as i64, 2)).is_negative());
    let quarter_ok = (0..=4 * k).all(|i| !poly.eval(&rat(i as i64, 4)).is_negative());
    let certified = residual_in_range == 0;
    push(
        AuditProperty::Nonnegative,
        half_ok && quarter_ok,
        certified,
        if certified {
            "sign fixed between integer roots; half-integer samples nonnegative".into()
        } else {
            format!("{residual_in_range} non-integer real root(s) in [0, k]; sampled at step 1/4")
        },
    );

    let q0 = poly.coeff(0);
    let dq0 = poly.coeff(1);
    let closed_ok = q0.is_zero() && (variant == Variant::Explicit || dq0.is_zero());
    push(
        AuditProperty::ClosedAtOrigin,
        closed_ok,
        true,
        format!("q(0) = {q0}, q'(0) = {dq0}"),
    );

    AuditReport { variant, checks }
}

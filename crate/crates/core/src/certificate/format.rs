//! Plain-text certificate records.
//!
//! ```text
//! ssp-certificate v1
//! k: 4
//! p: 2
//! r: 2/3
//! system: closed-explicit
//! coefficients: 0 4 -1
//! ```
//!
//! Coefficients are `y_0 .. y_p` as exact fractions. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{CertificatePolynomial, DualSystem};
use crate::rational::{parse_rational, Rational};

const HEADER: &str = "ssp-certificate v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CertificateParseError {
    /// 1-based; 0 when the problem is a missing field.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> CertificateParseError {
    CertificateParseError {
        line,
        message: message.into(),
    }
}

pub fn write_certificate(q: &CertificatePolynomial) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "k: {}", q.k()).unwrap();
    writeln!(out, "p: {}", q.p()).unwrap();
    writeln!(out, "r: {}", q.r()).unwrap();
    writeln!(out, "system: {}", q.system()).unwrap();
    let coeffs: Vec<String> = q.coefficients().iter().map(|c| c.to_string()).collect();
    writeln!(out, "coefficients: {}", coeffs.join(" ")).unwrap();
    out
}

pub fn parse_certificate(text: &str) -> Result<CertificatePolynomial, CertificateParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, other)) => return Err(err(n, format!("expected {HEADER:?}, found {other:?}"))),
        None => return Err(err(0, "empty certificate")),
    }

    let mut k: Option<usize> = None;
    let mut p: Option<(usize, usize)> = None;
    let mut r: Option<Rational> = None;
    let mut system: Option<DualSystem> = None;
    let mut coeffs: Option<(usize, Vec<Rational>)> = None;

    for (n, line) in lines {
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(n, format!("expected `key: value`, found {line:?}")))?;
        let value = value.trim();
        match key.trim() {
            "k" => k = Some(value.parse().map_err(|_| err(n, format!("bad step count {value:?}")))?),
            "p" => p = Some((n, value.parse().map_err(|_| err(n, format!("bad order {value:?}")))?)),
            "r" => r = Some(parse_rational(value).map_err(|e| err(n, e.to_string()))?),
            "system" => system = Some(value.parse().map_err(|e: String| err(n, e))?),
            "coefficients" => {
                let parsed = value
                    .split_whitespace()
                    .map(parse_rational)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| err(n, e.to_string()))?;
                coeffs = Some((n, parsed));
            }
            other => return Err(err(n, format!("unknown field {other:?}"))),
        }
    }

    let k = k.ok_or_else(|| err(0, "missing field k"))?;
    let (p_line, p) = p.ok_or_else(|| err(0, "missing field p"))?;
    let r = r.ok_or_else(|| err(0, "missing field r"))?;
    let system = system.ok_or_else(|| err(0, "missing field system"))?;
    let (c_line, coeffs) = coeffs.ok_or_else(|| err(0, "missing field coefficients"))?;
    if coeffs.len() != p + 1 {
        return Err(err(
            c_line,
            format!("expected {} coefficients for p = {p} (line {p_line}), found {}", p + 1, coeffs.len()),
        ));
    }
    CertificatePolynomial::new(coeffs, k, r, system).map_err(|e| err(c_line, e.to_string()))
}

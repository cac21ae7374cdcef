//! Exact rational scalars and dense row-major matrices over them.
//!
//! Everything in the certificate pipeline runs on [`Rational`], an
//! arbitrary-precision fraction that is kept in lowest terms after every
//! operation. Floating point only appears in the integrator and in the
//! approximate root report.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction with a positive, coprime denominator.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` with the convention `0^0 = 1`.
pub fn ipow(base: i64, exp: usize) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(exp as u32))
}

/// `2^-n`, the natural bisection tolerances.
pub fn two_pow_neg(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2).pow(n))
}

/// Lossy conversion for reporting and for the floating-point integrator.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as an exact rational: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses `"num/den"`, a plain integer, or a finite decimal such as
/// `"-0.49"`. Decimals are converted exactly.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    let fail = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(fail("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| fail("bad numerator"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if frac.is_empty() && whole.is_empty() {
            return Err(fail("no digits"));
        }
        let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if !digits_ok(whole) || !digits_ok(frac) {
            return Err(fail("bad decimal digits"));
        }
        let mut all = String::with_capacity(whole.len() + frac.len());
        all.push_str(whole);
        all.push_str(frac);
        if all.is_empty() {
            return Err(fail("no digits"));
        }
        let mut num = BigInt::from_str(&all).map_err(|_| fail("bad decimal digits"))?;
        if negative {
            num = -num;
        }
        let den = BigInt::from(10).pow(frac.len() as u32);
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| fail("not an integer, decimal or fraction"))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub(crate) mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(de::Error::custom)
    }
}

pub(crate) mod serde_rational_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

/// Dense `rows × cols` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row vectors. Returns `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n_rows = rows.len();
        Some(Self {
            rows: n_rows,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience for small literal matrices in tests and examples.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Option<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    /// Builds from a raw row-major buffer; `None` if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Rational>) -> Option<Self> {
        (entries.len() == rows * cols).then_some(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, col).clone()).collect()
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (c_out, &c) in cols.iter().enumerate() {
                out.set(r, c_out, self.get(r, c).clone());
            }
        }
        out
    }

    /// Appends `v` as an extra column.
    pub fn with_column(&self, v: &[Rational]) -> Self {
        assert_eq!(v.len(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            out.set(r, self.cols, v[r].clone());
        }
        out
    }

    /// `A · x`.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `Aᵀ · y`.
    pub fn transpose_mul_vec(&self, y: &[Rational]) -> Vec<Rational> {
        assert_eq!(y.len(), self.rows);
        (0..self.cols)
            .map(|c| {
                (0..self.rows).fold(Rational::zero(), |acc, r| acc + self.get(r, c) * &y[r])
            })
            .collect()
    }

    /// Exact determinant of a square matrix by Gaussian elimination.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &p;
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
        det
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Scales `v` by a positive factor so that its first nonzero entry is `±1`.
/// Zero vectors are returned unchanged.
pub fn normalize_first_nonzero(v: &mut [Rational]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        for x in v.iter_mut() {
            *x = &*x / &first;
        }
    }
}

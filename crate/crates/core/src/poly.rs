//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};
use num_traits::{One, Signed, Zero};

use crate::rational::{int, to_f64, Rational};

/// `c_0 + c_1 x + … + c_d x^d`, stored low to high with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x - a`.
    pub fn linear_root(a: &Rational) -> Self {
        Self::new(vec![-a.clone(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Coefficients padded with zeros to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<Rational> {
        let mut v = self.coeffs.clone();
        v.resize(len.max(v.len()), Rational::zero());
        v
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// Scaled so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&(Rational::one() / lc)),
            None => Self::zero(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - d];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + d] / lc;
            if !q.is_zero() {
                for (k, c) in divisor.coeffs.iter().enumerate() {
                    rem[i + k] -= &q * c;
                }
            }
            quot[i] = q;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Divides out `(x - a)`; returns the quotient and the remainder `q(a)`.
    pub fn deflate(&self, a: &Rational) -> (Self, Rational) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Rational::zero());
        }
        let n = self.coeffs.len();
        let mut quot = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry * a;
            if i == 0 {
                return (Self::new(quot), v);
            }
            quot[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Yun's square-free factorization: `self = lc · Π f_i^i` with each `f_i`
    /// monic, square-free and pairwise coprime. Constant factors are skipped.
    pub fn square_free_factors(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let b_next = b.div_rem(&a).0;
            let c_next = d.div_rem(&a).0;
            d = &c_next - &b_next.derivative();
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            b = b_next;
            i += 1;
        }
        out
    }

    /// Number of distinct real roots strictly greater than `a`, by Sturm's theorem.
    pub fn distinct_real_roots_above(&self, a: &Rational) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        // Work on the square-free part so every root is simple.
        let sf = self.div_rem(&self.gcd(&self.derivative())).0;
        let p = if sf.eval(a).is_zero() { sf.deflate(a).0 } else { sf };
        if p.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = sturm_chain(&p);
        let at_a = sign_changes(chain.iter().map(|q| q.eval(a)));
        let at_inf = sign_changes(chain.iter().map(|q| q.leading().cloned().unwrap_or_default()));
        at_a - at_inf
    }

    /// Real roots `≥ a`, counted with multiplicity.
    pub fn real_roots_at_least(&self, a: &Rational) -> usize {
        self.square_free_factors()
            .iter()
            .map(|(f, mult)| {
                let at = usize::from(f.eval(a).is_zero());
                mult * (f.distinct_real_roots_above(a) + at)
            })
            .sum()
    }

    /// Total number of real roots counted with multiplicity.
    pub fn real_root_count(&self) -> usize {
        self.square_free_factors()
            .iter()
            .map(|(f, mult)| {
                let chain = sturm_chain(f);
                let neg_inf = sign_changes(chain.iter().map(|q| {
                    let lc = q.leading().cloned().unwrap_or_default();
                    if q.degree().unwrap_or(0) % 2 == 1 {
                        -lc
                    } else {
                        lc
                    }
                }));
                let pos_inf =
                    sign_changes(chain.iter().map(|q| q.leading().cloned().unwrap_or_default()));
                mult * (neg_inf - pos_inf)
            })
            .sum()
    }

    /// Approximate roots from companion-matrix eigenvalues, polished with a
    /// few Newton steps. For reporting only.
    pub fn approximate_roots(&self) -> Vec<Complex<f64>> {
        let Some(n) = self.degree() else {
            return Vec::new();
        };
        if n == 0 {
            return Vec::new();
        }
        let monic = self.monic();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -to_f64(&monic.coeffs[i]);
        }
        let d = self.derivative();
        let mut roots: Vec<Complex<f64>> = companion
            .complex_eigenvalues()
            .iter()
            .map(|&z| {
                let mut z = z;
                for _ in 0..4 {
                    let dz = d.eval_f64(z);
                    if dz.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval_f64(z) / dz;
                    if !step.re.is_finite() || !step.im.is_finite() {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        roots
    }
}

fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(-r);
    }
    chain
}

fn sign_changes(values: impl Iterator<Item = Rational>) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            count += 1;
        }
        last = Some(pos);
    }
    count
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                if abs.is_integer() {
                    write!(f, "{abs}")?;
                } else {
                    write!(f, "({abs})")?;
                }
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

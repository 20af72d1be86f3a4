//! Exact rational arithmetic for the symbolic layer.
//!
//! Provides [`Rational`] helpers ("p/q" parsing and formatting), dense
//! univariate polynomials over the rationals ([`RationalPoly`]), bivariate
//! polynomials in z and conj(z) ([`BiIndexedPoly`]), the Laguerre family
//! [`laguerre`], the complex Hermite family [`complex_hermite`], and
//! [`exp_moment`], the integral of a polynomial against e^{-lambda t}
//! on [0, infinity).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Arbitrary-precision rational number, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Rational from an integer numerator and denominator.
///
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q`, or just `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` (optional leading sign, zero denominator rejected).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    match t.split_once('/') {
        None => t.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Nearest f64 to a rational (numerator over denominator in floating point).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let digits = 30usize;
        let scale = BigInt::from(10u8).pow(digits as u32);
        let scaled = (r * Rational::from_integer(scale.clone())).round();
        scaled.numer().to_f64().unwrap_or(f64::NAN)
            / scale.to_f64().unwrap_or(f64::INFINITY)
    })
}

/// n! as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=u64::from(n)).map(BigInt::from).product()
}

/// Binomial coefficient C(n, k) as a big integer (0 when k > n).
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Dense univariate polynomial with rational coefficients, stored in
/// ascending degree order with no trailing zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// c * t^k.
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        RationalPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of t^k (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Ascending coefficients, highest nonzero.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * rat_int(k as i64))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// p(lambda * t): rescales the argument, coefficient k picks up lambda^k.
    pub fn compose_scaled(&self, lambda: &Rational) -> Self {
        let mut pow = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let c = a * &pow;
                pow = &pow * lambda;
                c
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact Horner evaluation.
    pub fn eval_rational(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc * t + a;
        }
        acc
    }

    /// Floating Horner evaluation.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for a in self.coeffs.iter().rev() {
            acc = acc * t + rational_to_f64(a);
        }
        acc
    }

    /// Coefficients as `p/q` strings, ascending.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    /// Parses a polynomial from ascending `p/q` coefficient strings.
    pub fn from_coeff_strings<S: AsRef<str>>(strs: &[S]) -> Result<Self> {
        let coeffs = strs
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if a.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = a.abs();
            match k {
                0 => write!(f, "{}", format_rational(&abs))?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{} ", format_rational(&abs))?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

// ---- RationalPoly operators ----

impl Add<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        RationalPoly::from_coeffs(coeffs)
    }
}

impl Sub<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        RationalPoly::from_coeffs(coeffs)
    }
}

impl Mul<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut coeffs =
            vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(coeffs)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

macro_rules! forward_value_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: &RationalPoly) -> RationalPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<RationalPoly> for &RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_value_binop!(Add, add);
forward_value_binop!(Sub, sub);
forward_value_binop!(Mul, mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

/// k-th Laguerre polynomial: sum over j of (-1)^j C(k,j) t^j / j!.
pub fn laguerre(k: u32) -> RationalPoly {
    let coeffs = (0..=k)
        .map(|j| {
            let c = Rational::new(binomial(k, j), factorial(j));
            if j % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    RationalPoly::from_coeffs(coeffs)
}

/// Bivariate polynomial in z and conj(z) with rational coefficients,
/// keyed by (power of z, power of conj(z)).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiIndexedPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BiIndexedPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// c * z^j * conj(z)^k.
    pub fn monomial(c: Rational, j: u32, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((j, k), c);
        }
        BiIndexedPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms, keyed by (power of z, power of conj(z)).
    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rational> {
        &self.terms
    }

    pub fn coeff(&self, j: u32, k: u32) -> Rational {
        self.terms
            .get(&(j, k))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Complex conjugation: swaps the two indices (coefficients are real).
    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&(j, k), c)| ((k, j), c.clone()))
            .collect();
        BiIndexedPoly { terms }
    }

    /// Collapses a diagonal polynomial (every term has equal indices) to a
    /// univariate polynomial in t = |z|^2. Returns `None` off the diagonal.
    pub fn diagonal_profile(&self) -> Option<RationalPoly> {
        let mut coeffs = Vec::new();
        for (&(j, k), c) in &self.terms {
            if j != k {
                return None;
            }
            let j = j as usize;
            if coeffs.len() <= j {
                coeffs.resize(j + 1, Rational::zero());
            }
            coeffs[j] = c.clone();
        }
        Some(RationalPoly::from_coeffs(coeffs))
    }

    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|(&(j, k), c)| z.powu(j) * zb.powu(k) * rational_to_f64(c))
            .sum()
    }

    fn insert(&mut self, key: (u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

// ---- BiIndexedPoly operators ----

impl Add<&BiIndexedPoly> for &BiIndexedPoly {
    type Output = BiIndexedPoly;
    fn add(self, rhs: &BiIndexedPoly) -> BiIndexedPoly {
        let mut out = self.clone();
        for (&key, c) in &rhs.terms {
            out.insert(key, c.clone());
        }
        out
    }
}

impl Sub<&BiIndexedPoly> for &BiIndexedPoly {
    type Output = BiIndexedPoly;
    fn sub(self, rhs: &BiIndexedPoly) -> BiIndexedPoly {
        let mut out = self.clone();
        for (&key, c) in &rhs.terms {
            out.insert(key, -c);
        }
        out
    }
}

impl Mul<&BiIndexedPoly> for &BiIndexedPoly {
    type Output = BiIndexedPoly;
    fn mul(self, rhs: &BiIndexedPoly) -> BiIndexedPoly {
        let mut out = BiIndexedPoly::zero();
        for (&(j1, k1), a) in &self.terms {
            for (&(j2, k2), b) in &rhs.terms {
                out.insert((j1 + j2, k1 + k2), a * b);
            }
        }
        out
    }
}

impl Neg for &BiIndexedPoly {
    type Output = BiIndexedPoly;
    fn neg(self) -> BiIndexedPoly {
        let terms = self.terms.iter().map(|(&k, c)| (k, -c)).collect();
        BiIndexedPoly { terms }
    }
}

macro_rules! forward_value_binop_bi {
    ($trait:ident, $method:ident) => {
        impl $trait<BiIndexedPoly> for BiIndexedPoly {
            type Output = BiIndexedPoly;
            fn $method(self, rhs: BiIndexedPoly) -> BiIndexedPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BiIndexedPoly> for BiIndexedPoly {
            type Output = BiIndexedPoly;
            fn $method(self, rhs: &BiIndexedPoly) -> BiIndexedPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<BiIndexedPoly> for &BiIndexedPoly {
            type Output = BiIndexedPoly;
            fn $method(self, rhs: BiIndexedPoly) -> BiIndexedPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_value_binop_bi!(Add, add);
forward_value_binop_bi!(Sub, sub);
forward_value_binop_bi!(Mul, mul);

/// Complex Hermite polynomial H_{j,k}(z, conj(z)):
/// sum over r of (-1)^r r! C(j,r) C(k,r) z^{j-r} conj(z)^{k-r}.
///
/// On the diagonal, H_{k,k} = (-1)^k k! L_k(|z|^2).
pub fn complex_hermite(j: u32, k: u32) -> BiIndexedPoly {
    let mut out = BiIndexedPoly::zero();
    for r in 0..=j.min(k) {
        let mut c = Rational::from_integer(
            factorial(r) * binomial(j, r) * binomial(k, r),
        );
        if r % 2 == 1 {
            c = -c;
        }
        out.insert((j - r, k - r), c);
    }
    out
}

/// Exact integral of p(t) e^{-lambda t} over [0, infinity):
/// sum over m of p_m * m! / lambda^{m+1}. Requires lambda > 0.
pub fn exp_moment(p: &RationalPoly, lambda: &Rational) -> Result<Rational> {
    if !lambda.is_positive() {
        return Err(Error::NonpositiveRate(format_rational(lambda)));
    }
    let mut acc = Rational::zero();
    // inv_pow carries lambda^{-(m+1)}
    let mut inv_pow = lambda.recip();
    for (m, a) in p.coeffs.iter().enumerate() {
        acc += a * Rational::from_integer(factorial(m as u32)) * &inv_pow;
        inv_pow /= lambda;
    }
    Ok(acc)
}

//! Exact rational scalars, vectors and lexicographically ordered polynomials.
//!
//! Everything downstream (weights, flags, Hilbert polynomials, stability
//! parameters) is carried in arbitrary precision rationals. Rationals print as
//! `"p/q"`, or `"p"` when the denominator is one, which is also the JSON form.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A rational vector; componentwise arithmetic on equal lengths.
pub type RatVector = Vec<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let q = Rational::from_str(t).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
    Ok(q)
}

pub fn to_vec_rat(v: &[i64]) -> RatVector {
    v.iter().map(|&x| int(x)).collect()
}

pub fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn dot_int(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Pairing `Σ λᵢχᵢ` together with the squared norm `Σ λᵢ²`.
pub fn inner_and_norm(lambda: &[Rational], chi: &[Rational]) -> Result<(Rational, Rational)> {
    if lambda.len() != chi.len() {
        return Err(Error::Dimension(format!(
            "pairing of vectors of lengths {} and {}",
            lambda.len(),
            chi.len()
        )));
    }
    Ok((dot(lambda, chi), dot(lambda, lambda)))
}

/// Sign-aware comparison of `μ₁/√n₁` against `μ₂/√n₂` with `n₁, n₂ > 0`.
pub fn cmp_normalized(mu1: &Rational, n1: &Rational, mu2: &Rational, n2: &Rational) -> Ordering {
    let s1 = mu1.signum();
    let s2 = mu2.signum();
    if s1 != s2 {
        return s1.cmp(&s2);
    }
    let lhs = mu1 * mu1 * n2;
    let rhs = mu2 * mu2 * n1;
    if s1.is_negative() {
        rhs.cmp(&lhs)
    } else {
        lhs.cmp(&rhs)
    }
}

/// Scales a rational vector to the primitive integer vector on the same ray.
/// The zero vector maps to zeros.
pub fn primitive_integer(v: &[Rational]) -> Vec<i64> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            y.to_i64().expect("integer vector entry exceeds i64")
        })
        .collect()
}

pub fn primitive_int_vec(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Rational with a `"p/q"` string representation in serde.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_json(&v).map_err(D::Error::custom)
    }

    /// Accepts `"p/q"`, `"p"` or a JSON integer.
    pub fn from_json(v: &serde_json::Value) -> std::result::Result<Rational, String> {
        match v {
            serde_json::Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(int)
                .ok_or_else(|| format!("non-integral JSON number {n}; use a \"p/q\" string")),
            other => Err(format!("expected rational, got {other}")),
        }
    }
}

pub mod serde_rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|q| q.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let vals = Vec::<serde_json::Value>::deserialize(d)?;
        vals.iter()
            .map(|v| serde_rat::from_json(v).map_err(D::Error::custom))
            .collect()
    }
}

/// Matrix of rationals as nested arrays.
pub mod serde_rat_mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let rows = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        rows.iter()
            .map(|r| r.iter().map(|v| serde_rat::from_json(v).map_err(D::Error::custom)).collect())
            .collect()
    }
}

/// Polynomial with rational coefficients, stored dense in ascending degree
/// with no trailing zeros. The order is lexicographic from the top degree
/// down, so a positive leading coefficient means `p ≻ 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPolynomial {
    coeffs: Vec<Rational>,
}

impl RatPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(to_vec_rat(coeffs))
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial, which sits below every other degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// `p ≻ 0`.
    pub fn is_positive(&self) -> bool {
        self.leading().is_positive()
    }

    pub fn signum(&self) -> Ordering {
        self.leading().cmp(&Rational::zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

/// Lexicographic comparison, top degree first.
pub fn lex_compare(p: &RatPolynomial, q: &RatPolynomial) -> Ordering {
    (p - q).signum()
}

impl Ord for RatPolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_compare(self, other)
    }
}

impl PartialOrd for RatPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &RatPolynomial {
    type Output = RatPolynomial;
    fn add(self, rhs: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RatPolynomial {
    type Output = RatPolynomial;
    fn sub(self, rhs: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &RatPolynomial {
    type Output = RatPolynomial;
    fn neg(self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul<&Rational> for &RatPolynomial {
    type Output = RatPolynomial;
    fn mul(self, rhs: &Rational) -> RatPolynomial {
        self.scale(rhs)
    }
}

impl Add for RatPolynomial {
    type Output = RatPolynomial;
    fn add(self, rhs: RatPolynomial) -> RatPolynomial {
        &self + &rhs
    }
}

impl Sub for RatPolynomial {
    type Output = RatPolynomial;
    fn sub(self, rhs: RatPolynomial) -> RatPolynomial {
        &self - &rhs
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPolynomial({self})")
    }
}

impl Serialize for RatPolynomial {
    /// Constants are written as a bare `"p/q"` string.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.coeffs.len() <= 1 {
            return serde_rat::serialize(&self.coeff(0), s);
        }
        serde_rat_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for RatPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            // a bare scalar is read as a constant polynomial
            serde_json::Value::Array(items) => items
                .iter()
                .map(|x| serde_rat::from_json(x).map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(RatPolynomial::new),
            other => serde_rat::from_json(other)
                .map(RatPolynomial::constant)
                .map_err(D::Error::custom),
        }
    }
}

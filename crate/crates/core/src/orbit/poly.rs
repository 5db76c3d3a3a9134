//! Univariate polynomials and rational functions over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::scalar::{format_rational, Q};

/// Coefficients in ascending degree, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<Q>);

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| Q::from_integer(v.into())).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Q::one()])
    }

    /// `z^k`.
    pub fn monomial(k: usize, c: Q) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `(1 - z)^n`.
    pub fn one_minus_z_pow(n: usize) -> Self {
        let base = Poly::from_ints(&[1, -1]);
        (0..n).fold(Poly::one(), |acc, _| &acc * &base)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Poly::new(self.0.iter().map(|v| v * c).collect())
    }

    pub fn truncate(&self, below: usize) -> Self {
        Poly::new(self.0.iter().take(below).cloned().collect())
    }

    /// Euclidean division `(q, r)` with `self = q·d + r`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.0.clone();
        let mut quo = vec![Q::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().expect("nonempty") / &lead;
            for (i, dv) in d.0.iter().enumerate() {
                r[k + i] -= &c * dv;
            }
            quo[k] = c;
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Poly::new(quo), Poly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.leading();
        a.scale(&l.recip())
    }

    pub fn eval(&self, z: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * z + c)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c.abs();
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = a.is_one() && k > 0;
            let coeff = if unit { String::new() } else { format_rational(&a) };
            let star = if unit { "" } else { "*" };
            match k {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}{star}z")?,
                _ => write!(f, "{coeff}{star}z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Reduced rational function: coprime numerator and monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = Poly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_zero() || g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        if num.is_zero() {
            den = Poly::one();
        }
        let l = den.leading().recip();
        num = num.scale(&l);
        den = den.scale(&l);
        RatFunc { num, den }
    }

    pub fn poly(p: Poly) -> Self {
        RatFunc::new(p, Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }

    /// First `terms` Taylor coefficients at `z = 0`.
    pub fn series(&self, terms: usize) -> Option<Vec<Q>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return None;
        }
        let mut out: Vec<Q> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut v = self.num.coeff(k);
            for j in 1..=k.min(self.den.degree().unwrap_or(0)) {
                v -= self.den.coeff(j) * &out[k - j];
            }
            out.push(v / &d0);
        }
        Some(out)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Integers as JSON numbers, other rationals as `"a/b"` strings.
fn ser_coeffs(p: &Poly) -> Vec<serde_json::Value> {
    p.coeffs()
        .iter()
        .map(|c| match c.to_integer().to_i64() {
            Some(v) if c.is_integer() => serde_json::Value::from(v),
            _ => serde_json::Value::from(format_rational(c)),
        })
        .collect()
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RatFunc", 2)?;
        st.serialize_field("num", &ser_coeffs(&self.num))?;
        st.serialize_field("den", &ser_coeffs(&self.den))?;
        st.end()
    }
}

//! Coefficient fields for jets: exact rationals and `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn from_ratio(q: &Q) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_positive(&self) -> bool;

    /// `|self| <= tol` for floats, exact zero test for rationals.
    fn is_negligible(&self, tol: f64) -> bool;

    /// `self^r` for `self > 0`; `None` when the result leaves the field.
    fn rational_power(&self, r: &Q) -> Option<Self>;

    /// `exp(self)`, when representable.
    fn exp_value(&self) -> Option<Self>;

    /// `(sin(self), cos(self))`, when representable.
    fn sin_cos_value(&self) -> Option<(Self, Self)>;

    fn abs(&self) -> Self {
        if self.is_positive() || self.is_zero() {
            self.clone()
        } else {
            -self.clone()
        }
    }
}

impl Scalar for Q {
    const BACKEND: Backend = Backend::Exact;

    fn from_ratio(q: &Q) -> Self {
        q.clone()
    }

    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn rational_power(&self, r: &Q) -> Option<Self> {
        if !Signed::is_positive(self) {
            return None;
        }
        let q = r.denom().to_u32()?;
        let p = r.numer().clone();
        let root = |x: &BigInt| -> Option<BigInt> {
            let c = x.nth_root(q);
            (num_traits::pow(c.clone(), q as usize) == *x).then_some(c)
        };
        let base = Q::new(root(self.numer())?, root(self.denom())?);
        let e = p.abs().to_usize()?;
        let powered = num_traits::pow(base, e);
        Some(if p.is_negative() {
            powered.recip()
        } else {
            powered
        })
    }

    fn exp_value(&self) -> Option<Self> {
        self.is_zero().then(Q::one)
    }

    fn sin_cos_value(&self) -> Option<(Self, Self)> {
        self.is_zero().then(|| (Q::zero(), Q::one()))
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_ratio(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn rational_power(&self, r: &Q) -> Option<Self> {
        (*self > 0.0).then(|| self.powf(<f64 as Scalar>::from_ratio(r)))
    }

    fn exp_value(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn sin_cos_value(&self) -> Option<(Self, Self)> {
        Some(self.sin_cos())
    }
}

/// `a/b` as an exact rational.
pub fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// Parse `"a/b"`, `"-a"`, or a finite decimal like `"0.25"`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Q::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int_digits}{frac}").parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(digits, scale);
        return Some(if neg { -v } else { v });
    }
    let a: BigInt = s.parse().ok()?;
    Some(Q::from_integer(a))
}

/// Render a rational as `"a"` or `"a/b"`.
pub fn format_rational(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots() {
        assert_eq!(q(4, 9).rational_power(&q(1, 2)), Some(q(2, 3)));
        assert_eq!(q(8, 1).rational_power(&q(-1, 3)), Some(q(1, 2)));
        assert_eq!(q(2, 1).rational_power(&q(1, 2)), None);
        assert_eq!(q(-4, 1).rational_power(&q(1, 2)), None);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("-2"), Some(q(-2, 1)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(q(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}

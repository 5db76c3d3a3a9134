//! Truncated multivariate power series at a basepoint.
//!
//! A [`Jet`] of order `k` in `n` variables stores the Taylor coefficients of
//! degree `<= k` sparsely, keyed by [`MultiIndex`]. Every binary operation
//! truncates to the smaller operand order; nothing is ever padded with zeros
//! beyond the known order.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{Backend, Scalar, Q};

/// Largest ambient dimension a [`MultiIndex`] can address.
pub const MAX_DIM: usize = 8;

/// Exponent vector of a monomial `x^α`. Entries past the ambient dimension are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex([u8; MAX_DIM]);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex([0; MAX_DIM])
    }

    pub fn unit(i: usize) -> Self {
        let mut e = [0; MAX_DIM];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge(exps.len()));
        }
        let mut e = [0u8; MAX_DIM];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u8::try_from(x)
                .map_err(|_| Error::OrderTooLow(format!("exponent {x} too large")))?;
        }
        Ok(MultiIndex(e))
    }

    pub fn exponents(&self, dim: usize) -> Vec<u32> {
        self.0[..dim].iter().map(|&x| x as u32).collect()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.0[i] as u32
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    #[inline]
    pub fn plus(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        MultiIndex(e)
    }

    pub fn checked_minus(&self, other: &Self) -> Option<Self> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(MultiIndex(e))
    }

    pub fn incremented(&self, i: usize) -> Self {
        let mut e = self.0;
        e[i] += 1;
        MultiIndex(e)
    }

    pub fn decremented(&self, i: usize) -> Option<Self> {
        let mut e = self.0;
        e[i] = e[i].checked_sub(1)?;
        Some(MultiIndex(e))
    }

    /// `α! = Π α_i!`
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .flat_map(|&a| 1..=a as u64)
            .fold(BigInt::one(), |acc, x| acc * x)
    }

    /// Largest index with a nonzero exponent, if any.
    pub fn support_dim(&self) -> usize {
        self.0.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..self.support_dim()])
    }
}

/// All multi-indices of exactly `degree` in `n` variables, graded-lex descending in `x1`.
pub fn monomials(n: usize, degree: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, pos: usize, left: usize, cur: &mut [u8; MAX_DIM], out: &mut Vec<MultiIndex>) {
        if pos + 1 == n {
            cur[pos] = left as u8;
            out.push(MultiIndex(*cur));
            cur[pos] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(n, pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    assert!(n >= 1 && n <= MAX_DIM, "dimension {n} out of range");
    let mut out = Vec::new();
    rec(n, 0, degree, &mut [0; MAX_DIM], &mut out);
    out
}

/// All multi-indices of degree `<= order`, ordered by degree.
pub fn monomials_up_to(n: usize, order: usize) -> Vec<MultiIndex> {
    (0..=order).flat_map(|d| monomials(n, d)).collect()
}

/// Truncated Taylor series of order `order` in `dim` variables.
#[derive(Clone, PartialEq)]
pub struct Jet<S: Scalar> {
    dim: usize,
    order: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(dim: usize, order: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} out of range");
        Jet {
            dim,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, order: usize, c: S) -> Self {
        Self::monomial(dim, order, MultiIndex::zero(), c)
    }

    pub fn one(dim: usize, order: usize) -> Self {
        Self::constant(dim, order, S::one())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn variable(dim: usize, order: usize, i: usize) -> Self {
        assert!(i < dim);
        Self::monomial(dim, order, MultiIndex::unit(i), S::one())
    }

    pub fn monomial(dim: usize, order: usize, m: MultiIndex, c: S) -> Self {
        let mut j = Self::zero(dim, order);
        if m.degree() <= order && !c.is_zero() {
            j.coeffs.insert(m, c);
        }
        j
    }

    pub fn from_terms(dim: usize, order: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Self {
        let mut j = Self::zero(dim, order);
        for (m, c) in terms {
            if m.degree() <= order {
                j.accumulate(m, c);
            }
        }
        j.prune();
        j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    pub fn coeff(&self, m: &MultiIndex) -> S {
        self.coeffs.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&MultiIndex::zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient is within `tol` of zero.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.is_negligible(tol))
    }

    /// True when every nonconstant coefficient is within `tol` of zero.
    pub fn is_constant(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(m, c)| m.degree() == 0 || c.is_negligible(tol))
    }

    fn accumulate(&mut self, m: MultiIndex, c: S) {
        match self.coeffs.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let old = std::mem::replace(o.get_mut(), S::zero());
                *o.get_mut() = old + c;
            }
        }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "jets in {} and {} variables",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Drop every term of degree above `order` (which must not exceed the current order).
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet {
            dim: self.dim,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, degree: usize) -> Self {
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim, self.order);
        }
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, x)| (*m, x.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn add_constant(&self, c: &S) -> Self {
        let mut out = self.clone();
        out.accumulate(MultiIndex::zero(), c.clone());
        out.prune();
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (m, c) in &other.coeffs {
            if m.degree() <= order {
                out.accumulate(*m, c.clone());
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (m, c) in &other.coeffs {
            if m.degree() <= order {
                out.accumulate(*m, -c.clone());
            }
        }
        out.prune();
        Ok(out)
    }

    /// Truncated Cauchy product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul_to_order(other, self.order.min(other.order)))
    }

    /// Product with a factor vanishing at the origin: the result is known one
    /// degree beyond `other`, so its order is `min(self.order, other.order + 1)`.
    pub fn mul_vanishing(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm(0));
        }
        Ok(self.mul_to_order(other, self.order.min(other.order + 1)))
    }

    fn mul_to_order(&self, other: &Self, order: usize) -> Self {
        let mut out = Self::zero(self.dim, order);
        let rhs: Vec<(MultiIndex, usize, &S)> = other
            .coeffs
            .iter()
            .map(|(m, c)| (*m, m.degree(), c))
            .collect();
        for (ma, ca) in &self.coeffs {
            let da = ma.degree();
            if da > order {
                continue;
            }
            for (mb, db, cb) in &rhs {
                if da + db <= order {
                    out.accumulate(ma.plus(mb), ca.clone() * (*cb).clone());
                }
            }
        }
        out.prune();
        out
    }

    /// Multiplicative inverse via the geometric series.
    pub fn invert(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::ZeroConstantTerm("cannot invert a jet vanishing at the origin".into()));
        }
        let cinv = S::one() / c.clone();
        // a = c (1 + u)
        let u = self.add_constant(&-c).scale(&cinv);
        let one = Self::one(self.dim, self.order);
        let mut r = one.clone();
        for _ in 0..self.order {
            r = &one - &(&u * &r);
        }
        Ok(r.scale(&cinv))
    }

    /// `self^r` by the binomial series. Exact jets whose constant-term root is
    /// irrational fail with [`Error::IrrationalRoot`]; see [`AnyJet::power`] for promotion.
    pub fn power(&self, r: &Q) -> Result<Self> {
        let c = self.constant_term();
        if !c.is_positive() {
            return Err(Error::NonPositiveConstantTerm(format!(
                "power requires a positive constant term, got {c}"
            )));
        }
        let cr = c
            .rational_power(r)
            .ok_or_else(|| Error::IrrationalRoot(format!("{c}^({r}) is not rational")))?;
        let u = self.add_constant(&-c.clone()).scale(&(S::one() / c));
        // binomial coefficients C(r, m)
        let mut binom = Vec::with_capacity(self.order + 1);
        let mut b = Q::one();
        for m in 0..=self.order {
            binom.push(S::from_ratio(&b));
            b = b * (r - Q::from_integer(m.into())) / Q::from_integer((m + 1).into());
        }
        let mut acc = Self::constant(self.dim, self.order, binom[self.order].clone());
        for m in (0..self.order).rev() {
            acc = (&u * &acc).add_constant(&binom[m]);
        }
        Ok(acc.scale(&cr))
    }

    /// Integer power, negative exponents through [`Jet::invert`].
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = Self::one(self.dim, self.order);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Formal partial derivative `∂_i`; the order drops by one.
    pub fn differentiate(&self, i: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderTooLow("cannot differentiate an order-0 jet".into()));
        }
        if i >= self.dim {
            return Err(Error::DimensionMismatch(format!(
                "coordinate index {i} in dimension {}",
                self.dim
            )));
        }
        let mut out = Self::zero(self.dim, self.order - 1);
        for (m, c) in &self.coeffs {
            let e = m.get(i);
            if e > 0 {
                let m2 = m.decremented(i).expect("positive exponent");
                out.coeffs.insert(m2, c.clone() * S::from_i64(e as i64));
            }
        }
        Ok(out)
    }

    /// Truncated composition `self ∘ φ` where `φ` has one component per variable
    /// of `self`, each vanishing at the origin.
    pub fn compose(&self, phi: &[Jet<S>]) -> Result<Self> {
        if phi.len() != self.dim {
            return Err(Error::ArityMismatch {
                expected: self.dim,
                got: phi.len(),
            });
        }
        let target_dim = phi[0].dim;
        for (i, p) in phi.iter().enumerate() {
            if p.dim != target_dim {
                return Err(Error::DimensionMismatch("composition components differ in dimension".into()));
            }
            if !p.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm(i));
            }
        }
        let order = phi.iter().map(|p| p.order).min().unwrap_or(0).min(self.order);
        // powers[i][e] = φ_i^e, truncated to `order`
        let mut powers: Vec<Vec<Jet<S>>> = Vec::with_capacity(self.dim);
        for p in phi {
            let p = p.truncate(order);
            let mut row = vec![Jet::one(target_dim, order)];
            for e in 1..=order {
                let next = &row[e - 1] * &p;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = Jet::zero(target_dim, order);
        for (m, c) in &self.coeffs {
            if m.degree() > order {
                continue;
            }
            let mut term = Jet::constant(target_dim, order, c.clone());
            for (i, row) in powers.iter().enumerate() {
                let e = m.get(i) as usize;
                if e > 0 {
                    term = &term * &row[e];
                }
            }
            for (mm, cc) in term.coeffs {
                out.accumulate(mm, cc);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Apply a one-variable series `f(c + v) = Σ a_m v^m` with `v = self - c`.
    fn apply_series(&self, series: &[S]) -> Result<Self> {
        let f = Jet::from_terms(
            1,
            series.len() - 1,
            series
                .iter()
                .enumerate()
                .map(|(m, a)| (MultiIndex::from_exponents(&[m as u32]).expect("small"), a.clone())),
        );
        let v = self.add_constant(&-self.constant_term());
        f.compose(&[v])
    }

    fn inverse_factorials(&self) -> Vec<Q> {
        let mut out = Vec::with_capacity(self.order + 1);
        let mut f = Q::one();
        for m in 0..=self.order {
            if m > 0 {
                f = f / Q::from_integer(m.into());
            }
            out.push(f.clone());
        }
        out
    }

    pub fn exp(&self) -> Result<Self> {
        let c = self.constant_term();
        let ec = c
            .exp_value()
            .ok_or_else(|| Error::IrrationalRoot(format!("exp({c}) is not rational")))?;
        let series: Vec<S> = self.inverse_factorials().iter().map(S::from_ratio).collect();
        Ok(self.apply_series(&series)?.scale(&ec))
    }

    fn sin_cos_series(&self) -> (Vec<S>, Vec<S>) {
        let inv = self.inverse_factorials();
        let mut sin = Vec::with_capacity(inv.len());
        let mut cos = Vec::with_capacity(inv.len());
        for (m, f) in inv.iter().enumerate() {
            let sign = if (m / 2) % 2 == 0 { Q::one() } else { -Q::one() };
            let v = S::from_ratio(&(sign * f));
            if m % 2 == 1 {
                sin.push(v);
                cos.push(S::zero());
            } else {
                sin.push(S::zero());
                cos.push(v);
            }
        }
        (sin, cos)
    }

    pub fn sin(&self) -> Result<Self> {
        let c = self.constant_term();
        let (sc, cc) = c
            .sin_cos_value()
            .ok_or_else(|| Error::IrrationalRoot(format!("sin({c}) is not rational")))?;
        let (sin_s, cos_s) = self.sin_cos_series();
        let sv = self.apply_series(&sin_s)?;
        let cv = self.apply_series(&cos_s)?;
        // sin(c + v) = sin c cos v + cos c sin v
        Ok(&cv.scale(&sc) + &sv.scale(&cc))
    }

    pub fn cos(&self) -> Result<Self> {
        let c = self.constant_term();
        let (sc, cc) = c
            .sin_cos_value()
            .ok_or_else(|| Error::IrrationalRoot(format!("cos({c}) is not rational")))?;
        let (sin_s, cos_s) = self.sin_cos_series();
        let sv = self.apply_series(&sin_s)?;
        let cv = self.apply_series(&cos_s)?;
        // cos(c + v) = cos c cos v - sin c sin v
        Ok(&cv.scale(&cc) - &sv.scale(&sc))
    }

    /// Evaluate the truncated polynomial at a point.
    pub fn eval(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.coeffs {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate().take(self.dim) {
                for _ in 0..m.get(i) {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        let mut out = Jet::zero(self.dim, self.order);
        for (m, c) in &self.coeffs {
            let v = f(c);
            if !v.is_zero() {
                out.coeffs.insert(*m, v);
            }
        }
        out
    }

    pub fn to_float(&self) -> Jet<f64> {
        self.map_scalar(|c| c.to_f64())
    }

    /// Max absolute coefficient difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.dim != other.dim || self.order != other.order {
            return None;
        }
        let d = self.checked_sub(other).ok()?;
        Some(d.coeffs.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }
}

impl Jet<Q> {
    /// Power with backend promotion: if the root of the constant term is irrational
    /// the computation is redone on the float backend.
    pub fn power_promoting(&self, r: &Q) -> Result<AnyJet> {
        match self.power(r) {
            Ok(j) => Ok(AnyJet::Exact(j)),
            Err(Error::IrrationalRoot(_)) => Ok(AnyJet::Float(self.to_float().power(r)?)),
            Err(e) => Err(e),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a, S: Scalar> $tr<&'a Jet<S>> for &'a Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: &'a Jet<S>) -> Jet<S> {
                self.$checked(rhs).expect("jet operands must share a dimension")
            }
        }
        impl<S: Scalar> $tr<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.map_scalar(|c| -c.clone())
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[n={}, k={}]({})", self.dim, self.order, self)
    }
}

impl<S: Scalar> fmt::Display for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|(m, _)| (m.degree(), std::cmp::Reverse(**m)));
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for i in 0..self.dim {
                match m.get(i) {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    e => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// A jet on either backend. Mixing backends in one operation is an error.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyJet {
    Exact(Jet<Q>),
    Float(Jet<f64>),
}

impl AnyJet {
    pub fn backend(&self) -> Backend {
        match self {
            AnyJet::Exact(_) => Backend::Exact,
            AnyJet::Float(_) => Backend::Float,
        }
    }

    pub fn to_float(&self) -> Jet<f64> {
        match self {
            AnyJet::Exact(j) => j.to_float(),
            AnyJet::Float(j) => j.clone(),
        }
    }

    pub fn mul(&self, other: &AnyJet) -> Result<AnyJet> {
        match (self, other) {
            (AnyJet::Exact(a), AnyJet::Exact(b)) => Ok(AnyJet::Exact(a.checked_mul(b)?)),
            (AnyJet::Float(a), AnyJet::Float(b)) => Ok(AnyJet::Float(a.checked_mul(b)?)),
            _ => Err(Error::DimensionMismatch("cannot mix exact and float jets".into())),
        }
    }

    /// Fractional power; exact inputs promote to float only when the root is irrational.
    pub fn power(&self, r: &Q) -> Result<AnyJet> {
        match self {
            AnyJet::Exact(j) => j.power_promoting(r),
            AnyJet::Float(j) => Ok(AnyJet::Float(j.power(r)?)),
        }
    }
}

//! Jet-valued tensors, metrics, and diffeomorphism jets.

mod curvature;
mod matrix;

pub use curvature::*;
pub use matrix::{inertia, invert_values, JetMatrix};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{Scalar, Q};

/// Variance of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Up,
    Down,
}

/// A declared index symmetry between two slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

/// Dense multi-indexed array of jets. Slot order is the storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorJet<S: Scalar> {
    dim: usize,
    slots: Vec<Slot>,
    comps: Vec<Jet<S>>,
    symmetries: Vec<Symmetry>,
}

impl<S: Scalar> TensorJet<S> {
    pub fn from_fn(dim: usize, slots: Vec<Slot>, mut f: impl FnMut(&[usize]) -> Jet<S>) -> Self {
        let rank = slots.len();
        let total = dim.pow(rank as u32);
        let mut comps = Vec::with_capacity(total);
        let mut idx = vec![0usize; rank];
        for flat in 0..total {
            let mut r = flat;
            for k in (0..rank).rev() {
                idx[k] = r % dim;
                r /= dim;
            }
            comps.push(f(&idx));
        }
        TensorJet {
            dim,
            slots,
            comps,
            symmetries: Vec::new(),
        }
    }

    pub fn zero(dim: usize, order: usize, slots: Vec<Slot>) -> Self {
        Self::from_fn(dim, slots, |_| Jet::zero(dim, order))
    }

    /// Rank-0 tensor holding one jet.
    pub fn scalar(j: Jet<S>) -> Self {
        TensorJet {
            dim: j.dim(),
            slots: Vec::new(),
            comps: vec![j],
            symmetries: Vec::new(),
        }
    }

    pub fn with_symmetries(mut self, sym: Vec<Symmetry>) -> Self {
        self.symmetries = sym;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    /// `(covariant, contravariant)` slot counts.
    pub fn variance(&self) -> (usize, usize) {
        let down = self.slots.iter().filter(|s| **s == Slot::Down).count();
        (down, self.slots.len() - down)
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    #[inline]
    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> &Jet<S> {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Jet<S>) {
        let f = self.flat(idx);
        self.comps[f] = v;
    }

    pub fn components(&self) -> &[Jet<S>] {
        &self.comps
    }

    pub fn map(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        TensorJet {
            dim: self.dim,
            slots: self.slots.clone(),
            comps: self.comps.iter().map(f).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    pub fn to_float(&self) -> TensorJet<f64> {
        TensorJet {
            dim: self.dim,
            slots: self.slots.clone(),
            comps: self.comps.iter().map(Jet::to_float).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    pub fn scale(&self, c: &Jet<S>) -> Self {
        self.map(|j| j * c)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.slots != other.slots || self.dim != other.dim {
            return Err(Error::RankMismatch("subtracting tensors of different type".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            *a = &*a - b;
        }
        Ok(out)
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|j| j.terms().map(|(_, c)| c.to_f64().abs()))
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_zero)
    }

    /// Largest violation of the declared symmetries (exact zero on exact backends).
    pub fn symmetry_residual(&self) -> f64 {
        let rank = self.rank();
        let mut worst: f64 = 0.0;
        let mut idx = vec![0usize; rank];
        for flat in 0..self.comps.len() {
            let mut r = flat;
            for k in (0..rank).rev() {
                idx[k] = r % self.dim;
                r /= self.dim;
            }
            for s in &self.symmetries {
                let (a, b, anti) = match *s {
                    Symmetry::Symmetric(a, b) => (a, b, false),
                    Symmetry::Antisymmetric(a, b) => (a, b, true),
                };
                let mut swapped = idx.clone();
                swapped.swap(a, b);
                let x = self.get(&idx);
                let y = self.get(&swapped);
                let d = if anti { x + y } else { x - y };
                worst = worst.max(d.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Rank-2 tensor as a jet matrix.
    pub fn as_matrix(&self) -> Result<JetMatrix<S>> {
        if self.rank() != 2 {
            return Err(Error::RankMismatch(format!("expected rank 2, got {}", self.rank())));
        }
        Ok(JetMatrix::from_fn(self.dim, self.dim, |i, j| self.get(&[i, j]).clone()))
    }

    pub fn from_matrix(m: &JetMatrix<S>, slots: [Slot; 2]) -> Self {
        Self::from_fn(m.rows(), slots.to_vec(), |idx| m.get(idx[0], idx[1]).clone())
    }

    /// Value of every component at the origin, flattened in storage order.
    pub fn values(&self) -> Vec<S> {
        self.comps.iter().map(Jet::constant_term).collect()
    }
}

/// A symmetric invertible (0,2) tensor jet with a declared signature.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet<S: Scalar> {
    tensor: TensorJet<S>,
    signature: (usize, usize),
    basepoint: Vec<Q>,
}

impl<S: Scalar> MetricJet<S> {
    /// Builds a metric from its components; the lower triangle is mirrored from the upper.
    pub fn new(components: Vec<Vec<Jet<S>>>, signature: (usize, usize), basepoint: Vec<Q>) -> Result<Self> {
        let n = components.len();
        if components.iter().any(|r| r.len() != n) {
            return Err(Error::RankMismatch("metric components must be square".into()));
        }
        if signature.0 + signature.1 != n {
            return Err(Error::SignatureMismatch(format!(
                "p + q = {} but dim = {n}",
                signature.0 + signature.1
            )));
        }
        let tensor = TensorJet::from_fn(n, vec![Slot::Down, Slot::Down], |idx| {
            let (i, j) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
            components[i][j].clone()
        })
        .with_symmetries(vec![Symmetry::Symmetric(0, 1)]);
        let g = MetricJet {
            tensor,
            signature,
            basepoint,
        };
        let found = inertia(&g.value_matrix(), 1e-12)?;
        if found != signature {
            return Err(Error::SignatureMismatch(format!(
                "declared ({}, {}) but the value matrix has inertia ({}, {})",
                signature.0, signature.1, found.0, found.1
            )));
        }
        Ok(g)
    }

    /// Builds a metric and infers its signature from the value at the origin.
    pub fn with_inferred_signature(components: Vec<Vec<Jet<S>>>) -> Result<Self> {
        let n = components.len();
        let vals: Vec<Vec<S>> = (0..n)
            .map(|i| (0..n).map(|j| components[i.min(j)][i.max(j)].constant_term()).collect())
            .collect();
        let sig = inertia(&vals, 1e-12)?;
        Self::new(components, sig, vec![Q::from_integer(0.into()); n])
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn order(&self) -> usize {
        self.tensor.order()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn basepoint(&self) -> &[Q] {
        &self.basepoint
    }

    pub fn tensor(&self) -> &TensorJet<S> {
        &self.tensor
    }

    pub fn component(&self, i: usize, j: usize) -> &Jet<S> {
        self.tensor.get(&[i, j])
    }

    pub fn matrix(&self) -> JetMatrix<S> {
        self.tensor.as_matrix().expect("metric has rank 2")
    }

    pub fn value_matrix(&self) -> Vec<Vec<S>> {
        self.matrix().values()
    }

    pub fn is_riemannian(&self) -> bool {
        self.signature.1 == 0
    }

    fn rebuild(&self, f: impl Fn(usize, usize) -> Jet<S>) -> Result<Self> {
        let n = self.dim();
        let comps = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(comps, self.signature, self.basepoint.clone())
    }

    /// `factor · g` for a positive scalar jet.
    pub fn conformal_rescale(&self, factor: &Jet<S>) -> Result<Self> {
        if !factor.constant_term().is_positive() {
            return Err(Error::NonPositiveConstantTerm("conformal factor must be positive".into()));
        }
        self.rebuild(|i, j| self.component(i, j) * factor)
    }

    pub fn truncate(&self, order: usize) -> Self {
        MetricJet {
            tensor: self.tensor.truncate(order),
            signature: self.signature,
            basepoint: self.basepoint.clone(),
        }
    }

    pub fn to_float(&self) -> MetricJet<f64> {
        MetricJet {
            tensor: self.tensor.to_float(),
            signature: self.signature,
            basepoint: self.basepoint.clone(),
        }
    }

    /// Upper-triangle components, row-major.
    pub fn upper_components(&self) -> Vec<Jet<S>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(self.component(i, j).clone());
            }
        }
        out
    }
}

/// Jet of a diffeomorphism fixing the origin: target coordinates as jets in source coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffeoJet<S: Scalar> {
    comps: Vec<Jet<S>>,
}

impl<S: Scalar> DiffeoJet<S> {
    pub fn new(comps: Vec<Jet<S>>) -> Result<Self> {
        let n = comps.len();
        if n == 0 || comps.iter().any(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch("diffeomorphism must map n variables to n".into()));
        }
        if let Some(i) = comps.iter().position(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm(i));
        }
        let d = DiffeoJet { comps };
        invert_values(&d.jacobian_at_origin()).map_err(|_| Error::SingularJacobian)?;
        Ok(d)
    }

    pub fn identity(n: usize, order: usize) -> Self {
        DiffeoJet {
            comps: (0..n).map(|i| Jet::variable(n, order, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn components(&self) -> &[Jet<S>] {
        &self.comps
    }

    /// `J[a][i] = ∂_i φ^a` at the origin.
    pub fn jacobian_at_origin(&self) -> Vec<Vec<S>> {
        let n = self.dim();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|i| self.comps[a].coeff(&crate::jet::MultiIndex::unit(i)))
                    .collect()
            })
            .collect()
    }

    /// Jacobian as a jet matrix `J[a][i] = ∂_i φ^a`.
    pub fn jacobian(&self) -> Result<JetMatrix<S>> {
        let n = self.dim();
        let mut parts = Vec::with_capacity(n * n);
        for a in 0..n {
            for i in 0..n {
                parts.push(self.comps[a].differentiate(i)?);
            }
        }
        Ok(JetMatrix::from_fn(n, n, |a, i| parts[a * n + i].clone()))
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &DiffeoJet<S>) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose(&inner.comps))
            .collect::<Result<Vec<_>>>()?;
        DiffeoJet::new(comps)
    }

    pub fn to_float(&self) -> DiffeoJet<f64> {
        DiffeoJet {
            comps: self.comps.iter().map(Jet::to_float).collect(),
        }
    }
}

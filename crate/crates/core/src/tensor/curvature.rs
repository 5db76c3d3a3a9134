//! Levi-Civita curvature from metric jets.
//!
//! Conventions:
//! - `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`, stored as slots `[k, i, j]`.
//! - `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`, stored as `[l, i, j, k]`,
//!   so `R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l` and the unit sphere has positive scalar curvature.
//! - `Ric_jk = R^i_ijk`, `P = (Ric − R g / (2(n−1))) / (n−2)`.
//! - `C^l_ijk = R^l_ijk − (P_jk δ^l_i − P_ik δ^l_j + g_jk P^l_i − g_ik P^l_j)`.
//! - `C_ijk = ∇_i P_jk − ∇_j P_ik` (Cotton, n = 3).
//!
//! Jet orders drop by one per derivative: Christoffel symbols of an order-`K`
//! metric have order `K−1`, curvature `K−2`, Cotton `K−3`.

use super::{DiffeoJet, JetMatrix, MetricJet, Slot, Symmetry, TensorJet};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{Scalar, Q};

/// Curvature data computed once per metric.
#[derive(Debug, Clone)]
pub struct Curvature<S: Scalar> {
    pub metric: MetricJet<S>,
    pub inverse: TensorJet<S>,
    pub christoffel: TensorJet<S>,
    pub riemann: TensorJet<S>,
    pub ricci: TensorJet<S>,
    pub scalar: Jet<S>,
}

impl<S: Scalar> Curvature<S> {
    pub fn new(g: &MetricJet<S>) -> Result<Self> {
        if g.order() < 2 {
            return Err(Error::OrderTooLow(format!(
                "curvature needs a metric jet of order >= 2, got {}",
                g.order()
            )));
        }
        let inverse = inverse_metric(g)?;
        let christoffel = christoffel_from(g, &inverse)?;
        let riemann = riemann_from(&christoffel)?;
        let n = g.dim();
        let order = riemann.order();
        let ricci = TensorJet::from_fn(n, vec![Slot::Down, Slot::Down], |idx| {
            let mut acc = Jet::zero(n, order);
            for i in 0..n {
                acc = &acc + riemann.get(&[i, i, idx[0], idx[1]]);
            }
            acc
        })
        .with_symmetries(vec![Symmetry::Symmetric(0, 1)]);
        let scalar = full_trace(&ricci, &inverse);
        Ok(Curvature {
            metric: g.clone(),
            inverse,
            christoffel,
            riemann,
            ricci,
            scalar,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn schouten(&self) -> Result<TensorJet<S>> {
        let n = self.dim();
        if n < 3 {
            return Err(Error::DimensionTooSmall(format!(
                "Schouten tensor needs n >= 3, got {n}"
            )));
        }
        let order = self.ricci.order();
        let c_scalar = S::one() / S::from_i64(2 * (n as i64 - 1));
        let c_total = S::one() / S::from_i64(n as i64 - 2);
        let rs = self.scalar.scale(&c_scalar);
        Ok(TensorJet::from_fn(n, vec![Slot::Down, Slot::Down], |idx| {
            let g = self.metric.component(idx[0], idx[1]).truncate(order);
            (self.ricci.get(idx) - &(&rs * &g)).scale(&c_total)
        })
        .with_symmetries(vec![Symmetry::Symmetric(0, 1)]))
    }

    /// Weyl tensor as a (3,1) tensor `[l, i, j, k]`; identically zero for n = 3.
    pub fn weyl(&self) -> Result<TensorJet<S>> {
        let n = self.dim();
        let order = self.riemann.order();
        let slots = vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down];
        let sym = vec![Symmetry::Antisymmetric(1, 2)];
        if n == 3 {
            log::warn!("Weyl tensor vanishes identically in dimension 3");
            return Ok(TensorJet::zero(n, order, slots).with_symmetries(sym));
        }
        let p = self.schouten()?;
        // P^l_i = g^lm P_mi
        let p_mixed: Vec<Jet<S>> = (0..n * n)
            .map(|f| {
                let (l, i) = (f / n, f % n);
                let mut acc = Jet::zero(n, order);
                for m in 0..n {
                    acc = &acc + &(self.inverse.get(&[l, m]) * p.get(&[m, i]));
                }
                acc
            })
            .collect();
        let g: Vec<Jet<S>> = (0..n * n)
            .map(|f| self.metric.component(f / n, f % n).truncate(order))
            .collect();
        Ok(TensorJet::from_fn(n, slots, |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            let mut c = self.riemann.get(idx).clone();
            if l == i {
                c = &c - p.get(&[j, k]);
            }
            if l == j {
                c = &c + p.get(&[i, k]);
            }
            c = &c - &(&g[j * n + k] * &p_mixed[l * n + i]);
            c = &c + &(&g[i * n + k] * &p_mixed[l * n + j]);
            c
        })
        .with_symmetries(sym))
    }

    /// Cotton tensor `C_ijk = ∇_i P_jk − ∇_j P_ik`; requires n = 3 and order >= 3.
    pub fn cotton(&self) -> Result<TensorJet<S>> {
        let n = self.dim();
        if n != 3 {
            return Err(Error::WrongDimension(format!("Cotton tensor is used for n = 3, got {n}")));
        }
        if self.metric.order() < 3 {
            return Err(Error::OrderTooLow(format!(
                "Cotton tensor needs a metric jet of order >= 3, got {}",
                self.metric.order()
            )));
        }
        let p = self.schouten()?;
        let dp = covariant_derivative_with(&p, &self.christoffel)?;
        Ok(TensorJet::from_fn(n, vec![Slot::Down; 3], |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            dp.get(&[i, j, k]) - dp.get(&[j, i, k])
        })
        .with_symmetries(vec![Symmetry::Antisymmetric(0, 1)]))
    }
}

/// `g^ij` as a (2,0) tensor.
pub fn inverse_metric<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    let inv = g.matrix().inverse()?;
    Ok(TensorJet::from_matrix(&inv, [Slot::Up, Slot::Up]).with_symmetries(vec![Symmetry::Symmetric(0, 1)]))
}

pub fn christoffel<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    christoffel_from(g, &inverse_metric(g)?)
}

fn christoffel_from<S: Scalar>(g: &MetricJet<S>, ginv: &TensorJet<S>) -> Result<TensorJet<S>> {
    let n = g.dim();
    if g.order() < 1 {
        return Err(Error::OrderTooLow("Christoffel symbols need a metric jet of order >= 1".into()));
    }
    // dg[a][b][c] = ∂_a g_bc
    let mut dg = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                dg.push(g.component(b, c).differentiate(a)?);
            }
        }
    }
    let at = |a: usize, b: usize, c: usize| &dg[(a * n + b) * n + c];
    let half = S::one() / S::from_i64(2);
    // first kind Γ_{l,ij}
    let first: Vec<Jet<S>> = (0..n * n * n)
        .map(|f| {
            let (l, i, j) = (f / (n * n), (f / n) % n, f % n);
            (&(at(i, j, l) + at(j, i, l)) - at(l, i, j)).scale(&half)
        })
        .collect();
    Ok(TensorJet::from_fn(n, vec![Slot::Up, Slot::Down, Slot::Down], |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let order = g.order() - 1;
        let mut acc = Jet::zero(n, order);
        for l in 0..n {
            acc = &acc + &(ginv.get(&[k, l]) * &first[(l * n + i) * n + j]);
        }
        acc
    })
    .with_symmetries(vec![Symmetry::Symmetric(1, 2)]))
}

fn riemann_from<S: Scalar>(gamma: &TensorJet<S>) -> Result<TensorJet<S>> {
    let n = gamma.dim();
    let order = gamma
        .order()
        .checked_sub(1)
        .ok_or_else(|| Error::OrderTooLow("curvature needs Christoffel symbols of order >= 1".into()))?;
    let gt = gamma.truncate(order);
    // dgam[i][l][j][k] = ∂_i Γ^l_jk
    let mut dgam = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for c in gamma.components() {
            dgam.push(c.differentiate(i)?);
        }
    }
    let d = |i: usize, l: usize, j: usize, k: usize| &dgam[((i * n + l) * n + j) * n + k];
    let mut r = TensorJet::zero(n, order, vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down])
        .with_symmetries(vec![Symmetry::Antisymmetric(1, 2)]);
    for l in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let mut acc = d(i, l, j, k) - d(j, l, i, k);
                    for m in 0..n {
                        acc = &acc + &(gt.get(&[l, i, m]) * gt.get(&[m, j, k]));
                        acc = &acc - &(gt.get(&[l, j, m]) * gt.get(&[m, i, k]));
                    }
                    r.set(&[l, j, i, k], -&acc);
                    r.set(&[l, i, j, k], acc);
                }
            }
        }
    }
    Ok(r)
}

pub fn riemann<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    Ok(Curvature::new(g)?.riemann)
}

pub fn ricci<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    Ok(Curvature::new(g)?.ricci)
}

pub fn scalar_curvature<S: Scalar>(g: &MetricJet<S>) -> Result<Jet<S>> {
    Ok(Curvature::new(g)?.scalar)
}

pub fn schouten<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    if g.dim() < 3 {
        return Err(Error::DimensionTooSmall(format!(
            "Schouten tensor needs n >= 3, got {}",
            g.dim()
        )));
    }
    Curvature::new(g)?.schouten()
}

pub fn weyl<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    Curvature::new(g)?.weyl()
}

pub fn cotton<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    if g.dim() != 3 {
        return Err(Error::WrongDimension(format!(
            "Cotton tensor is used for n = 3, got {}",
            g.dim()
        )));
    }
    Curvature::new(g)?.cotton()
}

/// `Σ A_ij B^ij` for a (0,2) tensor and a (2,0) tensor.
fn full_trace<S: Scalar>(a: &TensorJet<S>, b: &TensorJet<S>) -> Jet<S> {
    let n = a.dim();
    let order = a.order().min(b.order());
    let mut acc = Jet::zero(n, order);
    for i in 0..n {
        for j in 0..n {
            acc = &acc + &(a.get(&[i, j]) * b.get(&[i, j]));
        }
    }
    acc
}

/// `∇T` with the new covariant slot first.
pub fn covariant_derivative<S: Scalar>(t: &TensorJet<S>, g: &MetricJet<S>) -> Result<TensorJet<S>> {
    covariant_derivative_with(t, &christoffel(g)?)
}

pub fn covariant_derivative_with<S: Scalar>(t: &TensorJet<S>, gamma: &TensorJet<S>) -> Result<TensorJet<S>> {
    let n = t.dim();
    if t.order() < 1 {
        return Err(Error::OrderTooLow("covariant derivative of an order-0 tensor".into()));
    }
    if gamma.dim() != n {
        return Err(Error::RankMismatch("tensor and connection dimensions differ".into()));
    }
    let order = (t.order() - 1).min(gamma.order());
    let mut slots = vec![Slot::Down];
    slots.extend_from_slice(t.slots());
    let mut derivs = Vec::with_capacity(n * t.components().len());
    for m in 0..n {
        for c in t.components() {
            derivs.push(c.differentiate(m)?.truncate(order));
        }
    }
    let per = t.components().len();
    let mut out = TensorJet::from_fn(n, slots, |idx| {
        let m = idx[0];
        let rest = &idx[1..];
        let flat = rest.iter().fold(0, |acc, &i| acc * n + i);
        let mut acc = derivs[m * per + flat].clone();
        let mut moved = rest.to_vec();
        for (s, slot) in t.slots().iter().enumerate() {
            let orig = rest[s];
            for b in 0..n {
                moved[s] = b;
                let comp = t.get(&moved);
                if comp.is_zero() {
                    continue;
                }
                match slot {
                    Slot::Up => acc = &acc + &(gamma.get(&[orig, m, b]) * comp),
                    Slot::Down => acc = &acc - &(gamma.get(&[b, m, orig]) * comp),
                }
            }
            moved[s] = orig;
        }
        acc
    });
    let sym = t
        .symmetries()
        .iter()
        .map(|s| match *s {
            Symmetry::Symmetric(a, b) => Symmetry::Symmetric(a + 1, b + 1),
            Symmetry::Antisymmetric(a, b) => Symmetry::Antisymmetric(a + 1, b + 1),
        })
        .collect();
    out = out.with_symmetries(sym);
    Ok(out)
}

/// Replace slot `s` by `Σ_a f(i, a) T_{.. a ..}`.
fn transform_slot<S: Scalar>(
    t: &TensorJet<S>,
    s: usize,
    new_slot: Slot,
    f: impl Fn(usize, usize) -> Jet<S>,
) -> TensorJet<S> {
    let n = t.dim();
    let mut slots = t.slots().to_vec();
    slots[s] = new_slot;
    let coeffs: Vec<Jet<S>> = (0..n * n).map(|k| f(k / n, k % n)).collect();
    TensorJet::from_fn(n, slots, |idx| {
        let mut moved = idx.to_vec();
        let i = idx[s];
        let mut acc: Option<Jet<S>> = None;
        for a in 0..n {
            moved[s] = a;
            let term = &coeffs[i * n + a] * t.get(&moved);
            acc = Some(match acc {
                Some(x) => &x + &term,
                None => term,
            });
        }
        acc.expect("n >= 1")
    })
}

/// Full contraction `‖T‖²_g`, raising covariant and lowering contravariant slots.
pub fn norm_sq<S: Scalar>(t: &TensorJet<S>, g: &MetricJet<S>) -> Result<Jet<S>> {
    if t.dim() != g.dim() {
        return Err(Error::RankMismatch(format!(
            "tensor in dimension {} against metric in dimension {}",
            t.dim(),
            g.dim()
        )));
    }
    let ginv = inverse_metric(g)?;
    norm_sq_with(t, g, &ginv)
}

pub fn norm_sq_with<S: Scalar>(t: &TensorJet<S>, g: &MetricJet<S>, ginv: &TensorJet<S>) -> Result<Jet<S>> {
    let mut dual = t.clone();
    for (s, slot) in t.slots().iter().enumerate() {
        dual = match slot {
            Slot::Down => transform_slot(&dual, s, Slot::Up, |i, a| ginv.get(&[i, a]).clone()),
            Slot::Up => transform_slot(&dual, s, Slot::Down, |i, a| g.component(i, a).clone()),
        };
    }
    let order = t.order().min(dual.order());
    let mut acc = Jet::zero(t.dim(), order);
    for (a, b) in t.components().iter().zip(dual.components()) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    Ok(acc)
}

fn levi_civita_sign(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `√|det g|`; on the exact backend this fails unless the determinant is a rational square.
pub fn volume_density<S: Scalar>(g: &MetricJet<S>) -> Result<Jet<S>> {
    let det = g.matrix().determinant();
    let det = if det.constant_term().is_positive() { det } else { -det };
    det.power(&Q::new(1.into(), 2.into()))
}

fn require_dim3<S: Scalar>(g: &MetricJet<S>) -> Result<()> {
    if g.dim() != 3 {
        return Err(Error::WrongDimension(format!("Hodge star is implemented for n = 3, got {}", g.dim())));
    }
    Ok(())
}

/// Hodge dual of a 2-form in 3D: `(*ω)_m = ½ ω^ij ε_ijm`.
pub fn hodge_star_2form<S: Scalar>(omega: &TensorJet<S>, g: &MetricJet<S>) -> Result<TensorJet<S>> {
    require_dim3(g)?;
    if omega.slots() != [Slot::Down, Slot::Down] {
        return Err(Error::RankMismatch("expected a (0,2) form".into()));
    }
    let vol = volume_density(g)?;
    let ginv = inverse_metric(g)?;
    let raised = transform_slot(
        &transform_slot(omega, 0, Slot::Up, |i, a| ginv.get(&[i, a]).clone()),
        1,
        Slot::Up,
        |i, a| ginv.get(&[i, a]).clone(),
    );
    let half = S::one() / S::from_i64(2);
    Ok(TensorJet::from_fn(3, vec![Slot::Down], |idx| {
        let m = idx[0];
        let mut acc = Jet::zero(3, raised.order().min(vol.order()));
        for i in 0..3 {
            for j in 0..3 {
                let e = levi_civita_sign(i, j, m);
                if e != 0 {
                    acc = &acc + &raised.get(&[i, j]).scale(&S::from_i64(e));
                }
            }
        }
        (&acc * &vol).scale(&half)
    }))
}

/// Hodge dual of a 1-form in 3D: `(*α)_ij = α^m ε_mij`.
pub fn hodge_star_1form<S: Scalar>(alpha: &TensorJet<S>, g: &MetricJet<S>) -> Result<TensorJet<S>> {
    require_dim3(g)?;
    if alpha.slots() != [Slot::Down] {
        return Err(Error::RankMismatch("expected a 1-form".into()));
    }
    let vol = volume_density(g)?;
    let ginv = inverse_metric(g)?;
    let raised = transform_slot(alpha, 0, Slot::Up, |i, a| ginv.get(&[i, a]).clone());
    Ok(TensorJet::from_fn(3, vec![Slot::Down, Slot::Down], |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = Jet::zero(3, raised.order().min(vol.order()));
        for m in 0..3 {
            let e = levi_civita_sign(m, i, j);
            if e != 0 {
                acc = &acc + &raised.get(&[m]).scale(&S::from_i64(e));
            }
        }
        &acc * &vol
    })
    .with_symmetries(vec![Symmetry::Antisymmetric(0, 1)]))
}

/// `(L_X g)_ij = X^m ∂_m g_ij + g_mj ∂_i X^m + g_im ∂_j X^m`.
///
/// When every component of `X` vanishes at the origin the result keeps the
/// full order of `g` (given `X` of order at least one more).
pub fn lie_derivative_metric<S: Scalar>(x: &[Jet<S>], g: &MetricJet<S>) -> Result<TensorJet<S>> {
    let n = g.dim();
    if x.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: x.len() });
    }
    let xo = x.iter().map(Jet::order).min().unwrap_or(0);
    if xo < g.order() {
        return Err(Error::OrderTooLow(format!(
            "vector field order {xo} is below the metric order {}",
            g.order()
        )));
    }
    if g.order() == 0 {
        return Err(Error::OrderTooLow("Lie derivative of an order-0 metric".into()));
    }
    let vanishing = x.iter().all(|c| c.constant_term().is_zero());
    let mut dx = Vec::with_capacity(n * n);
    for m in 0..n {
        for i in 0..n {
            dx.push(x[m].differentiate(i)?);
        }
    }
    let mut dg = Vec::with_capacity(n * n * n);
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(g.component(i, j).differentiate(m)?);
            }
        }
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc: Option<Jet<S>> = None;
            let mut push = |t: Jet<S>| {
                acc = Some(match acc.take() {
                    Some(a) => &a + &t,
                    None => t,
                })
            };
            for m in 0..n {
                let d = &dg[(m * n + i) * n + j];
                push(if vanishing { x[m].mul_vanishing(d)? } else { &x[m] * d });
                push(g.component(m, j) * &dx[m * n + i]);
                push(g.component(i, m) * &dx[m * n + j]);
            }
            out.push(acc.expect("n >= 1"));
        }
    }
    Ok(TensorJet::from_fn(n, vec![Slot::Down, Slot::Down], |idx| out[idx[0] * n + idx[1]].clone())
        .with_symmetries(vec![Symmetry::Symmetric(0, 1)]))
}

/// Pullback of an arbitrary tensor jet by a diffeomorphism jet fixing the origin.
pub fn pullback_tensor<S: Scalar>(phi: &DiffeoJet<S>, t: &TensorJet<S>) -> Result<TensorJet<S>> {
    let n = t.dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch("diffeomorphism and tensor dimensions differ".into()));
    }
    let jac = phi.jacobian()?;
    let needs_inverse = t.slots().contains(&Slot::Up);
    let jinv = if needs_inverse {
        Some(jac.inverse().map_err(|_| Error::SingularJacobian)?)
    } else {
        None
    };
    let comps = t
        .components()
        .iter()
        .map(|c| c.compose(phi.components()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = TensorJet::from_fn(n, t.slots().to_vec(), |idx| {
        comps[idx.iter().fold(0, |acc, &i| acc * n + i)].clone()
    });
    for (s, slot) in t.slots().iter().enumerate() {
        out = match slot {
            Slot::Down => transform_slot(&out, s, Slot::Down, |i, a| jac.get(a, i).clone()),
            Slot::Up => {
                let ji: &JetMatrix<S> = jinv.as_ref().expect("computed above");
                transform_slot(&out, s, Slot::Up, |i, a| ji.get(i, a).clone())
            }
        };
    }
    Ok(out.with_symmetries(t.symmetries().to_vec()))
}

/// `φ^* g`.
pub fn pullback_metric<S: Scalar>(phi: &DiffeoJet<S>, g: &MetricJet<S>) -> Result<MetricJet<S>> {
    let t = pullback_tensor(phi, g.tensor())?;
    let n = g.dim();
    let comps = (0..n)
        .map(|i| (0..n).map(|j| t.get(&[i, j]).clone()).collect())
        .collect();
    MetricJet::new(comps, g.signature(), g.basepoint().to_vec())
}

/// Conformal rescaling by `e^{2f}` for `f` vanishing at the origin.
pub fn conformal_exp_rescale<S: Scalar>(g: &MetricJet<S>, f: &Jet<S>) -> Result<MetricJet<S>> {
    let factor = f.scale(&S::from_i64(2)).exp()?;
    g.conformal_rescale(&factor)
}

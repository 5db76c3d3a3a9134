//! Scalar differential invariants of conformal structures.
//!
//! The fundamental tensor (Weyl for n ≥ 4, Cotton for n = 3) fixes a normalized
//! representative `g₀` with `‖C‖²_{g₀} = ±1`. Its operator on `Λ²T` (or the
//! Cotton–York operator on `T` for n = 3) yields spectral invariants and a
//! canonical frame; derivatives along the frame, its structure constants and the
//! Christoffel symbols of `g₀` in the frame give the higher invariants.

mod frame;
mod independence;
mod invariance;
mod pipeline;
mod spectral;

pub use frame::*;
pub use independence::*;
pub use invariance::*;
pub use pipeline::*;
pub use spectral::*;

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{q, Scalar, Q};
use crate::tensor::{norm_sq, volume_density, Curvature, JetMatrix, MetricJet, TensorJet};

/// `Tr(W²) = LAMBDA2_TRACE_FACTOR · ‖C‖²` for the Weyl operator on `Λ²T` in the basis `dx^a ∧ dx^b`, `a < b`.
pub const LAMBDA2_TRACE_FACTOR: f64 = 0.25;

/// Below this `|‖C‖²(0)|` a float structure counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FundamentalKind {
    /// Weyl tensor `C^l_{ijk}`, n ≥ 4.
    Weyl31,
    /// Cotton tensor `C_{ijk}`, n = 3.
    Cotton03,
}

impl FundamentalKind {
    /// `‖C‖²_{λg} = λ^{weight} ‖C‖²_g`.
    pub fn weight(self) -> i64 {
        match self {
            FundamentalKind::Weyl31 => -2,
            FundamentalKind::Cotton03 => -3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FundamentalTensor<S: Scalar> {
    pub kind: FundamentalKind,
    pub tensor: TensorJet<S>,
    /// `‖C‖²_g`.
    pub s: Jet<S>,
    pub weight: i64,
}

/// Minimal metric jet order for the fundamental tensor.
pub fn fundamental_order(n: usize) -> usize {
    if n == 3 {
        3
    } else {
        2
    }
}

pub fn fundamental_tensor<S: Scalar>(g: &MetricJet<S>) -> Result<FundamentalTensor<S>> {
    let n = g.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall(format!(
            "conformal structures have no local invariants for n = {n}"
        )));
    }
    let need = fundamental_order(n);
    if g.order() < need {
        return Err(Error::OrderTooLow(format!(
            "the fundamental tensor in dimension {n} needs a metric jet of order >= {need}, got {}",
            g.order()
        )));
    }
    let curv = Curvature::new(g)?;
    let (kind, tensor) = if n == 3 {
        (FundamentalKind::Cotton03, curv.cotton()?)
    } else {
        (FundamentalKind::Weyl31, curv.weyl()?)
    };
    let s = norm_sq(&tensor, g)?;
    Ok(FundamentalTensor {
        kind,
        tensor,
        s,
        weight: kind.weight(),
    })
}

#[derive(Debug, Clone)]
pub struct NormalizedStructure<S: Scalar> {
    pub g0: MetricJet<S>,
    pub sign: i8,
    /// `g₀ = λ g`.
    pub lambda: Jet<S>,
}

/// `g₀ = |s|^{-1/weight} g`, so that `‖C‖²_{g₀} ≡ sign(s(0))`.
pub fn normalize<S: Scalar>(g: &MetricJet<S>, f: &FundamentalTensor<S>) -> Result<NormalizedStructure<S>> {
    let s0 = f.s.constant_term();
    if s0.is_negligible(DEGENERACY_TOL) {
        return Err(Error::DegenerateStructure(format!(
            "‖C‖² vanishes at the base point ({s0})"
        )));
    }
    let (sign, abs_s) = if s0.is_positive() { (1, f.s.clone()) } else { (-1, -&f.s) };
    let lambda = abs_s.power(&q(1, -f.weight))?;
    let g0 = g.conformal_rescale(&lambda)?;
    Ok(NormalizedStructure { g0, sign, lambda })
}

/// Nonconstant coefficients and constant-term defect of `‖C‖²_{g₀}` against `±1`.
pub fn normalization_residual<S: Scalar>(nz: &NormalizedStructure<S>, f: &FundamentalTensor<S>) -> Result<f64> {
    let s = norm_sq(&f.tensor, &nz.g0)?;
    let target = S::from_i64(nz.sign.into());
    let diff = s.add_constant(&-target);
    Ok(diff.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max))
}

/// Index pairs `a < b` labelling the basis `dx^a ∧ dx^b` of `Λ²`.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn require_kind<S: Scalar>(f: &FundamentalTensor<S>, kind: FundamentalKind) -> Result<()> {
    if f.kind != kind {
        return Err(Error::WrongDimension(format!("operation needs a {kind:?} fundamental tensor")));
    }
    Ok(())
}

/// Weyl operator on 2-forms, `W[(ab),(cd)] = C^d_{abe} g^{ec}`, in the coordinate basis.
pub fn weyl_operator_jet<S: Scalar>(g: &MetricJet<S>, f: &FundamentalTensor<S>) -> Result<JetMatrix<S>> {
    require_kind(f, FundamentalKind::Weyl31)?;
    let n = g.dim();
    let order = f.tensor.order().min(g.order());
    let ginv = g.matrix().map(|c| c.truncate(order)).inverse()?;
    let pr = pairs(n);
    Ok(JetMatrix::from_fn(pr.len(), pr.len(), |p, r| {
        let ((a, b), (c, d)) = (pr[p], pr[r]);
        let mut acc = Jet::zero(n, order);
        for e in 0..n {
            let w = f.tensor.get(&[d, a, b, e]);
            if !w.is_zero() {
                acc = &acc + &(&w.truncate(order) * ginv.get(e, c));
            }
        }
        acc
    }))
}

/// Basis of `T` orthonormal for the value of `g`: columns `e_i` with `g(e_i, e_i) = η_i`,
/// positive directions first.
pub fn orthonormal_basis(g: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = g.nrows();
    let eig = g.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut e = DMatrix::zeros(n, n);
    let mut eta = Vec::with_capacity(n);
    for (col, &k) in idx.iter().enumerate() {
        let d = eig.eigenvalues[k];
        e.set_column(col, &(eig.eigenvectors.column(k) / d.abs().sqrt()));
        eta.push(d.signum());
    }
    (e, eta)
}

/// Change of basis on 2-form components: coordinate `dx^c∧dx^d` to the frame `θ^i∧θ^j`
/// of the columns of `e`.
fn lambda2_transform(e: &DMatrix<f64>) -> DMatrix<f64> {
    let n = e.nrows();
    let pr = pairs(n);
    DMatrix::from_fn(pr.len(), pr.len(), |p, r| {
        let ((i, j), (c, d)) = (pr[p], pr[r]);
        e[(c, i)] * e[(d, j)] - e[(d, i)] * e[(c, j)]
    })
}

/// Weyl operator at the origin in the basis `e_i ∧ e_j` of a `g`-orthonormal frame,
/// with the diagonal of the induced inner product on `Λ²`.
pub fn weyl_operator(g: &MetricJet<f64>, f: &FundamentalTensor<f64>) -> Result<(SpectralData, Vec<f64>)> {
    let w = value_matrix(&weyl_operator_jet(g, f)?);
    if w.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateStructure("the Weyl operator vanishes at the base point".into()));
    }
    let (e, eta) = orthonormal_basis(&value_matrix(&g.matrix()));
    let p = lambda2_transform(&e);
    let pinv = p
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateStructure("singular frame".into()))?;
    let wf = &p * w * pinv;
    let weights = pairs(g.dim()).iter().map(|&(i, j)| eta[i] * eta[j]).collect();
    Ok((SpectralData::new(wf), weights))
}

/// `max |ΛW − (ΛW)ᵀ|` with `Λ` the diagonal induced inner product.
pub fn self_adjoint_residual(w: &DMatrix<f64>, weights: &[f64]) -> f64 {
    let lw = DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| weights[i] * w[(i, j)]);
    (&lw - lw.transpose()).amax()
}

/// Number `d = C(n,2) − 2` of spectral invariants.
pub fn spectral_count(n: usize) -> usize {
    n * (n - 1) / 2 - 2
}

/// `Î_i = Tr(Wⁱ) / |s|^{i/2}` for `i = 2..=d+1`, as jets.
pub fn trace_invariants(w: &JetMatrix<f64>, s: &Jet<f64>) -> Result<Vec<Jet<f64>>> {
    let n = s.dim();
    let d = spectral_count(n);
    let order = w.order().min(s.order());
    let w = w.map(|c| c.truncate(order));
    let s = s.truncate(order);
    if s.constant_term().abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateStructure("‖C‖² vanishes at the base point".into()));
    }
    let abs_s = if s.constant_term() > 0.0 { s } else { -&s };
    let mut out = Vec::with_capacity(d);
    let mut pw = w.clone();
    for i in 2..=d + 1 {
        pw = pw.mul(&w);
        out.push(&pw.trace() * &abs_s.power(&q(-(i as i64), 2))?);
    }
    Ok(out)
}

fn mat_mul_q(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Q::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Exact `R_ij = Tr(Wⁱ) Tr(Wʲ) / s(0)^{(i+j)/2}` for `2 ≤ i ≤ j ≤ d+1`, `i + j` even.
pub fn trace_invariants_exact(g: &MetricJet<Q>) -> Result<Vec<(usize, usize, Q)>> {
    let n = g.dim();
    let g2 = g.truncate(2);
    let f = fundamental_tensor(&g2)?;
    require_kind(&f, FundamentalKind::Weyl31)?;
    let s0 = f.s.constant_term();
    if s0.is_zero() {
        return Err(Error::DegenerateStructure("‖C‖² vanishes at the base point".into()));
    }
    let w = weyl_operator_jet(&g2, &f)?.values();
    let d = spectral_count(n);
    let mut traces = vec![Q::zero(); d + 2];
    let mut pw = w.clone();
    for t in traces.iter_mut().skip(2) {
        pw = mat_mul_q(&pw, &w);
        *t = (0..pw.len()).fold(Q::zero(), |acc, i| acc + &pw[i][i]);
    }
    let mut out = Vec::new();
    for i in 2..=d + 1 {
        for j in i..=d + 1 {
            if (i + j) % 2 == 0 {
                let den = num_traits::pow(s0.clone(), (i + j) / 2);
                out.push((i, j, &traces[i] * &traces[j] / den));
            }
        }
    }
    Ok(out)
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `Y^i_j = ½ g^{im} ε_m{}^{kl} C_{klj}` with `ε = vol · [mpq]`.
fn cotton_york_with<S: Scalar>(g: &MetricJet<S>, c: &TensorJet<S>, vol: &Jet<S>) -> Result<JetMatrix<S>> {
    let n = 3;
    let order = c.order().min(g.order()).min(vol.order());
    let ginv = g.matrix().map(|c| c.truncate(order)).inverse()?;
    let half = S::one() / S::from_i64(2);
    // u[m][k][l] = ε_{mpq} g^{pk} g^{ql}
    let mut u = vec![Jet::zero(n, order); 27];
    for m in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut acc = Jet::zero(n, order);
                for p in 0..n {
                    for qq in 0..n {
                        let e = levi_civita(m, p, qq);
                        if e != 0 {
                            let t = ginv.get(p, k) * ginv.get(qq, l);
                            acc = if e > 0 { &acc + &t } else { &acc - &t };
                        }
                    }
                }
                u[(m * n + k) * n + l] = &acc * &vol.truncate(order);
            }
        }
    }
    Ok(JetMatrix::from_fn(n, n, |i, j| {
        let mut acc = Jet::zero(n, order);
        for m in 0..n {
            let mut inner = Jet::zero(n, order);
            for k in 0..n {
                for l in 0..n {
                    let cc = c.get(&[k, l, j]);
                    if !cc.is_zero() {
                        inner = &inner + &(&u[(m * n + k) * n + l] * &cc.truncate(order));
                    }
                }
            }
            acc = &acc + &(ginv.get(i, m) * &inner);
        }
        acc.scale(&half)
    }))
}

/// Cotton–York operator of the normalized metric, oriented so that `det Y(0) > 0`.
pub fn cotton_york_jet<S: Scalar>(g0: &MetricJet<S>, f: &FundamentalTensor<S>) -> Result<JetMatrix<S>> {
    require_kind(f, FundamentalKind::Cotton03)?;
    let vol = volume_density(g0)?;
    let y = cotton_york_with(g0, &f.tensor, &vol)?;
    let det = y.determinant().constant_term();
    if det.is_negligible(1e-300) {
        return Err(Error::DegenerateStructure("the Cotton–York operator is singular at the base point".into()));
    }
    Ok(if det.is_positive() { y } else { y.map(|c| -c) })
}

/// Cotton–York operator at the origin, in a `g₀`-orthonormal frame.
pub fn cotton_york(g0: &MetricJet<f64>, f: &FundamentalTensor<f64>) -> Result<SpectralData> {
    let y = value_matrix(&cotton_york_jet(g0, f)?);
    let (e, _) = orthonormal_basis(&value_matrix(&g0.matrix()));
    let einv = e
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateStructure("singular frame".into()))?;
    Ok(SpectralData::new(einv * y * e))
}

/// `Tr(Y³)² / Tr(Y²)³`, a scale-free function of the Cotton–York spectrum.
pub fn cotton_york_ratio(y: &JetMatrix<f64>) -> Result<Jet<f64>> {
    let y2 = y.mul(y);
    let t2 = y2.trace();
    let t3 = y2.mul(y).trace();
    Ok(&(&t3 * &t3) * &t2.powi(-3)?)
}

/// Exact `Tr(Y³)² / Tr(Y²)³` at the origin. The volume factor cancels, so the
/// value is rational for rational metric jets.
pub fn cotton_york_ratio_exact(g: &MetricJet<Q>) -> Result<Q> {
    let g3 = g.truncate(3);
    let f = fundamental_tensor(&g3)?;
    if f.s.constant_term().is_zero() {
        return Err(Error::DegenerateStructure("‖C‖² vanishes at the base point".into()));
    }
    let y = cotton_york_with(&g3, &f.tensor, &Jet::one(3, 0))?.values();
    let y2 = mat_mul_q(&y, &y);
    let y3 = mat_mul_q(&y2, &y);
    let t2 = (0..3).fold(Q::zero(), |acc, i| acc + &y2[i][i]);
    let t3 = (0..3).fold(Q::zero(), |acc, i| acc + &y3[i][i]);
    if t2.is_zero() {
        return Err(Error::DegenerateStructure("Tr(Y²) vanishes".into()));
    }
    Ok(&t3 * &t3 / (&t2 * &t2 * &t2))
}

/// `A = g⁻¹σ` for a 2-form given by its components on [`pairs`].
pub fn two_form_operator(sigma: &[Jet<f64>], ginv: &JetMatrix<f64>) -> JetMatrix<f64> {
    let n = ginv.rows();
    let pr = pairs(n);
    let order = sigma.iter().map(Jet::order).min().unwrap_or(0).min(ginv.order());
    let mut full = vec![Jet::zero(ginv.jet_dim(), order); n * n];
    for (p, &(a, b)) in pr.iter().enumerate() {
        full[a * n + b] = sigma[p].truncate(order);
        full[b * n + a] = -&sigma[p].truncate(order);
    }
    JetMatrix::from_fn(n, n, |a, b| {
        let mut acc = Jet::zero(ginv.jet_dim(), order);
        for c in 0..n {
            if !full[c * n + b].is_zero() {
                acc = &acc + &(&ginv.get(a, c).truncate(order) * &full[c * n + b]);
            }
        }
        acc
    })
}

/// `‖σ‖² = Σ_{a<b, c<d} σ_ab σ_cd (g^{ac}g^{bd} − g^{ad}g^{bc})`.
pub fn two_form_norm_sq(sigma: &[Jet<f64>], ginv: &JetMatrix<f64>) -> Jet<f64> {
    let pr = pairs(ginv.rows());
    let order = sigma.iter().map(Jet::order).min().unwrap_or(0).min(ginv.order());
    let mut acc = Jet::zero(ginv.jet_dim(), order);
    for (p, &(a, b)) in pr.iter().enumerate() {
        for (r, &(c, d)) in pr.iter().enumerate() {
            let m = &(ginv.get(a, c) * ginv.get(b, d)) - &(ginv.get(a, d) * ginv.get(b, c));
            acc = &acc + &(&(&sigma[p] * &sigma[r]) * &m);
        }
    }
    acc.truncate(order)
}

/// Jets of the eigen-2-forms of the Weyl operator, in eigenvalue order.
pub fn eigen_forms(w: &JetMatrix<f64>) -> Result<(SpectralData, Vec<Vec<Jet<f64>>>)> {
    let spec = SpectralData::new(value_matrix(w));
    spec.require_simple()?;
    let mut forms = Vec::with_capacity(spec.dim());
    for i in 0..spec.dim() {
        let (mu, v) = spec.real_pair(i)?;
        forms.push(eigen_jet(w, mu, &v)?.1);
    }
    Ok((spec, forms))
}

/// `A_i = g₀⁻¹σ_i` for the first `d` eigen-2-forms, normalized to `‖σ_i‖² = ±1`.
pub fn eigen_operators(w: &JetMatrix<f64>, g0: &MetricJet<f64>) -> Result<Vec<JetMatrix<f64>>> {
    let n = g0.dim();
    let (_, forms) = eigen_forms(w)?;
    let ginv = g0.matrix().map(|c| c.truncate(w.order())).inverse()?;
    forms
        .iter()
        .take(spectral_count(n))
        .map(|sigma| {
            let nrm = two_form_norm_sq(sigma, &ginv);
            let v = nrm.constant_term();
            if v.abs() <= 1e-9 {
                return Err(Error::NullEigenform(format!("‖σ‖² = {v:.3e}")));
            }
            let scale = if v > 0.0 { nrm } else { -&nrm }.power(&q(-1, 2))?;
            let sigma: Vec<Jet<f64>> = sigma.iter().map(|c| c * &scale).collect();
            Ok(two_form_operator(&sigma, &ginv))
        })
        .collect()
}

/// `Re Tr(A_1^{k_1} ⋯ A_d^{k_d})` at the origin for each exponent word.
pub fn word_traces(ops: &[JetMatrix<f64>], words: &[Vec<usize>]) -> Vec<f64> {
    let vals: Vec<DMatrix<f64>> = ops.iter().map(value_matrix).collect();
    let n = vals.first().map_or(0, DMatrix::nrows);
    words
        .iter()
        .map(|w| {
            let mut m = DMatrix::identity(n, n);
            for (a, &k) in vals.iter().zip(w) {
                for _ in 0..k {
                    m = &m * a;
                }
            }
            m.trace()
        })
        .collect()
}

/// Words `A_i² A_j²`, `i < j`; even in every `A_i`, hence independent of eigenvector signs.
pub fn default_words(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let mut w = vec![0; d];
            w[i] = 2;
            w[j] = 2;
            out.push(w);
        }
    }
    out
}

//! Canonical frames and the invariants read off in them: derivatives of scalar
//! invariants, structure constants and Christoffel symbols of `g₀`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::spectral::{eigen_jet, value_matrix, SpectralData};
use super::{eigen_forms, two_form_operator};
use crate::error::{Error, Result};
use crate::jet::{Jet, MultiIndex};
use crate::scalar::q;
use crate::tensor::{christoffel, JetMatrix, MetricJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameProvenance {
    GeneralWord,
    Quaternionic4d,
    CottonYork3d,
}

/// How the residual sign and numbering freedom of a frame was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameConvention {
    /// Signs chosen so that `e_a(I) > 0` for the reference invariant `I`;
    /// reordered by `|e_a(I)|` ascending when the construction gives no order.
    InvariantDerivative,
    /// Signs chosen so that the largest coordinate of `e_a(0)` is positive.
    Coordinate,
}

#[derive(Debug, Clone)]
pub struct CanonicalFrame {
    /// Column `a` is the vector field `e_a`.
    pub vectors: JetMatrix<f64>,
    pub provenance: FrameProvenance,
    pub convention: FrameConvention,
    /// Eigenvalue attached to each vector by the construction.
    pub labels: Vec<f64>,
    /// `g₀(e_a, e_a) = η_a`.
    pub eta: Vec<f64>,
}

impl CanonicalFrame {
    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    pub fn value(&self) -> DMatrix<f64> {
        value_matrix(&self.vectors)
    }

    /// `g₀(e_a, e_b)` at the origin.
    pub fn gram(&self, g0: &MetricJet<f64>) -> DMatrix<f64> {
        let e = self.value();
        e.transpose() * value_matrix(&g0.matrix()) * e
    }

    /// `max |g₀(e_a, e_b) − η_a δ_ab|`.
    pub fn gram_residual(&self, g0: &MetricJet<f64>) -> f64 {
        let g = self.gram(g0);
        (&g - DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eta.clone()))).amax()
    }
}

/// Normalizes `v` to `g₀(v, v) = ±1`.
fn normalize_vector(v: Vec<Jet<f64>>, g0: &MetricJet<f64>) -> Result<(Vec<Jet<f64>>, f64)> {
    let n = v.len();
    let order = v.iter().map(Jet::order).min().unwrap_or(0);
    let mut nrm = Jet::zero(n, order);
    for a in 0..n {
        for b in 0..n {
            nrm = &nrm + &(&(&v[a] * &v[b]) * g0.component(a, b));
        }
    }
    let c = nrm.constant_term();
    let scale_ref = v.iter().map(|x| x.constant_term().powi(2)).sum::<f64>();
    if c.abs() <= 1e-9 * scale_ref {
        return Err(Error::NullEigenform(format!("frame vector has g₀-norm {c:.3e}")));
    }
    let eta = c.signum();
    let f = if c > 0.0 { nrm } else { -&nrm }.power(&q(-1, 2))?;
    Ok((v.iter().map(|x| x * &f).collect(), eta))
}

/// Frame of `g₀`-normalized eigenvectors of a `g₀`-symmetric operator, by ascending eigenvalue.
fn eigen_frame(s: &JetMatrix<f64>, g0: &MetricJet<f64>) -> Result<(Vec<Vec<Jet<f64>>>, Vec<f64>, Vec<f64>)> {
    let spec = SpectralData::new(value_matrix(s));
    spec.require_simple()?;
    if !spec.is_real() {
        return Err(Error::NonSimpleSpectrum("operator has non-real eigenvalues".into()));
    }
    let mut vecs = Vec::new();
    let mut labels = Vec::new();
    let mut eta = Vec::new();
    for i in 0..spec.dim() {
        let (mu, v0) = spec.real_pair(i)?;
        let (_, v) = eigen_jet(s, mu, &v0)?;
        let (v, e) = normalize_vector(v, g0)?;
        vecs.push(v);
        labels.push(mu);
        eta.push(e);
    }
    Ok((vecs, labels, eta))
}

/// `e(I)(0) = Σ_m e^m(0) ∂_m I(0)`.
fn derivative_at_origin(e: &[Jet<f64>], i: &Jet<f64>) -> f64 {
    e.iter()
        .enumerate()
        .map(|(m, em)| em.constant_term() * i.coeff(&MultiIndex::unit(m)))
        .sum()
}

fn assemble(
    vecs: Vec<Vec<Jet<f64>>>,
    labels: Vec<f64>,
    eta: Vec<f64>,
    reference: Option<&Jet<f64>>,
    reorder: bool,
    provenance: FrameProvenance,
) -> CanonicalFrame {
    let n = vecs.len();
    let ders: Option<Vec<f64>> = reference
        .filter(|r| r.order() >= 1)
        .map(|r| vecs.iter().map(|v| derivative_at_origin(v, r)).collect());
    let usable = ders.as_ref().filter(|d| {
        let scale = d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let min = d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let mut sorted: Vec<f64> = d.iter().map(|v| v.abs()).collect();
        sorted.sort_by(f64::total_cmp);
        let distinct = !reorder || sorted.windows(2).all(|w| w[1] - w[0] > 1e-9 * scale);
        min > 1e-10 * scale && distinct
    });
    let mut idx: Vec<usize> = (0..n).collect();
    let mut signs = vec![1.0; n];
    let convention = if let Some(d) = usable {
        if reorder {
            idx.sort_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()));
        }
        for a in 0..n {
            signs[a] = d[a].signum();
        }
        FrameConvention::InvariantDerivative
    } else {
        log::warn!("frame locked by coordinates: the reference invariant has no usable derivative");
        for (a, v) in vecs.iter().enumerate() {
            let big = v
                .iter()
                .map(Jet::constant_term)
                .fold(0.0f64, |m, x| if x.abs() > m.abs() + 1e-12 { x } else { m });
            signs[a] = if big < 0.0 { -1.0 } else { 1.0 };
        }
        FrameConvention::Coordinate
    };
    let order = vecs.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let vectors = JetMatrix::from_fn(n, n, |m, col| {
        let a = idx[col];
        vecs[a][m].truncate(order).scale(&signs[a])
    });
    CanonicalFrame {
        vectors,
        provenance,
        convention,
        labels: idx.iter().map(|&a| labels[a]).collect(),
        eta: idx.iter().map(|&a| eta[a]).collect(),
    }
}

/// Eigenframe of the oriented Cotton–York operator, ordered by eigenvalue.
pub fn cotton_york_frame(g0: &MetricJet<f64>, y: &JetMatrix<f64>, reference: Option<&Jet<f64>>) -> Result<CanonicalFrame> {
    let (vecs, labels, eta) = eigen_frame(y, g0)?;
    Ok(assemble(vecs, labels, eta, reference, false, FrameProvenance::CottonYork3d))
}

fn word_candidates(ops: &[JetMatrix<f64>]) -> Vec<(String, Box<dyn Fn() -> JetMatrix<f64> + '_>)> {
    let d = ops.len();
    let mut out: Vec<(String, Box<dyn Fn() -> JetMatrix<f64> + '_>)> = Vec::new();
    for i in 0..d {
        out.push((format!("A{}^2", i + 1), Box::new(move || ops[i].mul(&ops[i]))));
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push((
                format!("A{0}^2 A{1}^2 + A{1}^2 A{0}^2", i + 1, j + 1),
                Box::new(move || {
                    let a = ops[i].mul(&ops[i]);
                    let b = ops[j].mul(&ops[j]);
                    a.mul(&b).add(&b.mul(&a))
                }),
            ));
        }
    }
    for i in 0..d {
        for j in 0..d {
            if i != j {
                out.push((
                    format!("A{0} A{1}^2 A{0}", i + 1, j + 1),
                    Box::new(move || ops[i].mul(&ops[j]).mul(&ops[j]).mul(&ops[i])),
                ));
            }
        }
    }
    out
}

/// Frame from the first candidate word operator with simple real spectrum.
///
/// Candidates are `g₀`-symmetric and even in every `A_i`, scanned in the order
/// `A_i²`, `A_i²A_j² + A_j²A_i²`, `A_i A_j² A_i`.
pub fn canonical_frame(
    g0: &MetricJet<f64>,
    ops: &[JetMatrix<f64>],
    reference: Option<&Jet<f64>>,
) -> Result<(CanonicalFrame, String)> {
    for (name, build) in word_candidates(ops) {
        let s = build();
        let spec = SpectralData::new(value_matrix(&s));
        if !spec.is_simple() || !spec.is_real() {
            continue;
        }
        match eigen_frame(&s, g0) {
            Ok((vecs, labels, eta)) => {
                return Ok((
                    assemble(vecs, labels, eta, reference, false, FrameProvenance::GeneralWord),
                    name,
                ))
            }
            Err(Error::NullEigenform(_)) | Err(Error::NonSimpleSpectrum(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoSimpleWordOperator)
}

/// Checks of the quaternionic structure at the origin.
#[derive(Debug, Clone, Serialize)]
pub struct QuaternionicData {
    /// Sorted spectra of `B_1, B_2, B_3`.
    pub b_spectra: Vec<Vec<f64>>,
    /// `dim Π^{ε₁}_1 ∩ Π^{ε₂}_2` for `(ε₁, ε₂) = (+,+), (+,−), (−,+), (−,−)`.
    pub intersection_dims: Vec<usize>,
    /// `max ‖J_i J_j − (−δ_ij + ε_ijk J_k)‖` over the left and right triples.
    pub relation_residual: f64,
    /// `max ‖[J^left_i, J^right_j]‖`.
    pub commutator_residual: f64,
}

fn pfaffian4(s: &[f64]) -> f64 {
    // pairs: 01 02 03 12 13 23
    s[0] * s[5] - s[1] * s[4] + s[2] * s[3]
}

fn quaternion_relation_residual(j: &[DMatrix<f64>]) -> f64 {
    let id = DMatrix::<f64>::identity(4, 4);
    let mut r: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let lhs = &j[a] * &j[b];
            let rhs = if a == b {
                -&id
            } else {
                let c = 3 - a - b;
                let sign = if (b + 3 - a) % 3 == 1 { 1.0 } else { -1.0 };
                &j[c] * sign
            };
            r = r.max((lhs - rhs).amax());
        }
    }
    r
}

/// Canonical frame in dimension 4 from the splitting `so(4) = so(3) ⊕ so(3)`.
///
/// The self-dual and anti-self-dual eigen-2-forms of the Weyl operator give two
/// commuting quaternionic triples `J^left_i`, `J^right_i`. The commuting involutions
/// `B_i = J^left_i J^right_i` split `T` into four common eigenlines, which are the
/// eigenlines of `B_1 + 2 B_2`.
pub fn quaternionic_frame_4d(
    g0: &MetricJet<f64>,
    w: &JetMatrix<f64>,
    reference: Option<&Jet<f64>>,
) -> Result<(CanonicalFrame, QuaternionicData)> {
    if g0.dim() != 4 {
        return Err(Error::WrongDimension(format!("quaternionic frame needs n = 4, got {}", g0.dim())));
    }
    if !g0.is_riemannian() {
        return Err(Error::WrongSignature(format!(
            "quaternionic frame needs a definite metric, got signature {:?}",
            g0.signature()
        )));
    }
    let order = w.order();
    let (_, forms) = eigen_forms(w)?;
    let ginv = g0.matrix().map(|c| c.truncate(order)).inverse()?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for sigma in &forms {
        let vals: Vec<f64> = sigma.iter().map(Jet::constant_term).collect();
        let a = two_form_operator(sigma, &ginv);
        let t = a.mul(&a).trace().scale(&-0.25);
        let j = a.scale(&t.power(&q(-1, 2))?);
        if pfaffian4(&vals) > 0.0 {
            left.push(j);
        } else {
            right.push(j);
        }
    }
    if left.len() != 3 || right.len() != 3 {
        return Err(Error::NonSplittable(format!(
            "eigen-2-forms split {}+{} between Λ⁺ and Λ⁻",
            left.len(),
            right.len()
        )));
    }
    for triple in [&mut left, &mut right] {
        let prod = value_matrix(&triple[0].mul(&triple[1]));
        let j3 = value_matrix(&triple[2]);
        if prod.dot(&j3) < 0.0 {
            triple[2] = triple[2].map(|c| -c);
        }
    }
    let b: Vec<JetMatrix<f64>> = (0..3).map(|i| left[i].mul(&right[i])).collect();
    let k = b[0].add(&b[1].scale(&Jet::constant(4, order, 2.0)));
    let (vecs, labels, eta) = eigen_frame(&k, g0)?;

    let lv: Vec<DMatrix<f64>> = left.iter().map(value_matrix).collect();
    let rv: Vec<DMatrix<f64>> = right.iter().map(value_matrix).collect();
    let bv: Vec<DMatrix<f64>> = b.iter().map(value_matrix).collect();
    let b_spectra = bv
        .iter()
        .map(|m| {
            let mut ev = SpectralData::new(m.clone()).real_eigenvalues();
            ev.sort_by(f64::total_cmp);
            ev
        })
        .collect();
    let id = DMatrix::<f64>::identity(4, 4);
    let mut intersection_dims = Vec::new();
    for (e1, e2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let mut stacked = DMatrix::zeros(8, 4);
        stacked.view_mut((0, 0), (4, 4)).copy_from(&(&bv[0] - &id * e1));
        stacked.view_mut((4, 0), (4, 4)).copy_from(&(&bv[1] - &id * e2));
        intersection_dims.push(4 - numerical_rank_abs(&stacked, 1e-8));
    }
    let mut commutator_residual: f64 = 0.0;
    for l in &lv {
        for r in &rv {
            commutator_residual = commutator_residual.max((l * r - r * l).amax());
        }
    }
    let data = QuaternionicData {
        b_spectra,
        intersection_dims,
        relation_residual: quaternion_relation_residual(&lv).max(quaternion_relation_residual(&rv)),
        commutator_residual,
    };
    Ok((
        assemble(vecs, labels, eta, reference, true, FrameProvenance::Quaternionic4d),
        data,
    ))
}

fn numerical_rank_abs(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().filter(|&&s| s > tol).count()
}

fn require_first_order(frame: &CanonicalFrame) -> Result<()> {
    if frame.vectors.order() < 1 {
        return Err(Error::OrderTooLow("frame derivatives need frame jets of order >= 1".into()));
    }
    Ok(())
}

/// `∂_p e_a^m` at the origin, indexed `[a][m][p]`.
fn frame_derivatives(frame: &CanonicalFrame) -> Vec<Vec<Vec<f64>>> {
    let n = frame.dim();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|m| (0..n).map(|p| frame.vectors.get(m, a).coeff(&MultiIndex::unit(p))).collect())
                .collect()
        })
        .collect()
}

fn coframe(frame: &CanonicalFrame) -> Result<DMatrix<f64>> {
    frame
        .value()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateStructure("frame is singular at the origin".into()))
}

/// `∇_j I = e_j(I)` at the origin.
pub fn invariant_derivation(frame: &CanonicalFrame, i: &Jet<f64>) -> Result<Vec<f64>> {
    if i.order() < 1 {
        return Err(Error::OrderTooLow("invariant derivation needs an invariant jet of order >= 1".into()));
    }
    let e = frame.value();
    let n = frame.dim();
    Ok((0..n)
        .map(|j| (0..n).map(|m| e[(m, j)] * i.coeff(&MultiIndex::unit(m))).sum())
        .collect())
}

/// `c^k_{ij}` with `[e_i, e_j] = c^k_{ij} e_k`, indexed `[k][i][j]`.
pub fn structure_constants(frame: &CanonicalFrame) -> Result<Vec<Vec<Vec<f64>>>> {
    require_first_order(frame)?;
    let n = frame.dim();
    let e = frame.value();
    let de = frame_derivatives(frame);
    let th = coframe(frame)?;
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let bracket: Vec<f64> = (0..n)
                .map(|m| (0..n).map(|p| e[(p, i)] * de[j][m][p] - e[(p, j)] * de[i][m][p]).sum())
                .collect();
            for (k, ck) in c.iter_mut().enumerate() {
                ck[i][j] = (0..n).map(|m| th[(k, m)] * bracket[m]).sum();
            }
        }
    }
    Ok(c)
}

/// `Γ^k_{ij}` with `∇_{e_i} e_j = Γ^k_{ij} e_k` for the Levi-Civita connection of `g₀`, indexed `[k][i][j]`.
pub fn frame_christoffel(g0: &MetricJet<f64>, frame: &CanonicalFrame) -> Result<Vec<Vec<Vec<f64>>>> {
    require_first_order(frame)?;
    let n = frame.dim();
    let gamma = christoffel(g0)?;
    let e = frame.value();
    let de = frame_derivatives(frame);
    let th = coframe(frame)?;
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let cov: Vec<f64> = (0..n)
                .map(|m| {
                    let mut acc = 0.0;
                    for p in 0..n {
                        acc += e[(p, i)] * de[j][m][p];
                        for qq in 0..n {
                            acc += gamma.get(&[m, p, qq]).constant_term() * e[(p, i)] * e[(qq, j)];
                        }
                    }
                    acc
                })
                .collect();
            for (k, ok) in out.iter_mut().enumerate() {
                ok[i][j] = (0..n).map(|m| th[(k, m)] * cov[m]).sum();
            }
        }
    }
    Ok(out)
}

/// `max |e_i(g₀(e_j,e_k)) − Γ^m_{ij} g₀(e_m,e_k) − Γ^m_{ik} g₀(e_j,e_m)|` at the origin.
pub fn compatibility_residual(g0: &MetricJet<f64>, frame: &CanonicalFrame, gamma: &[Vec<Vec<f64>>]) -> f64 {
    let n = frame.dim();
    let gram0 = frame.gram(g0);
    // G_jk = e_j^a g_ab e_k^b as jets
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let mut gjk = Jet::zero(n, frame.vectors.order().min(g0.order()));
            for a in 0..n {
                for b in 0..n {
                    gjk = &gjk + &(&(frame.vectors.get(a, j) * g0.component(a, b)) * frame.vectors.get(b, k));
                }
            }
            let dg: Vec<f64> = (0..n).map(|p| gjk.coeff(&MultiIndex::unit(p))).collect();
            let e = frame.value();
            for i in 0..n {
                let lhs: f64 = (0..n).map(|p| e[(p, i)] * dg[p]).sum();
                let rhs: f64 = (0..n)
                    .map(|m| gamma[m][i][j] * gram0[(m, k)] + gamma[m][i][k] * gram0[(j, m)])
                    .sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

/// Number of exported frame Christoffel symbols, `Γ^k_{ij}` with `i ≤ j`.
pub fn frame_christoffel_count(n: usize) -> usize {
    n * n * (n + 1) / 2
}

/// Number of independent structure constants `c^k_{ij}`, `i < j`.
pub fn structure_constant_count(n: usize) -> usize {
    n * n * (n - 1) / 2
}

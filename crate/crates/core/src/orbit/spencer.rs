//! Symbol-level maps: Spencer δ, the projection Π onto `V`, `ζ_k = (1⊗Π)∘δ`,
//! prolongations of subalgebras of `End(T)`, and the `ι` embedding of `T*`.
//!
//! Coordinates:
//! - `S^m T* ⊗ T` has basis `x^α e_j`, index `a·n + j` with `a` the position of `α`
//!   in [`monomials`]`(n, m)`.
//! - `End(T) = T* ⊗ T` has basis `dx^i ⊗ e_j`, the matrix entry `M^j_i`, index `j·n + i`.
//! - `S^m T* ⊗ End(T)` has index `b·n² + (j·n + i)`.
//!
//! δ is realized by differentiation, `δ(x^α e_j) = Σ_i α_i x^{α−e_i} dx^i ⊗ e_j`,
//! which differs from polarization by a nonzero factor per monomial.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::Rng;

use super::linop::LinOpQ;
use crate::error::{Error, Result};
use crate::jet::{monomials, MultiIndex};
use crate::scalar::{q, Q};
use crate::tensor::invert_values;

fn index_of(mons: &[MultiIndex]) -> HashMap<MultiIndex, usize> {
    mons.iter().enumerate().map(|(k, m)| (*m, k)).collect()
}

/// `δ : S^{k+1}T*⊗T → S^kT*⊗T*⊗T`.
pub fn spencer_delta(n: usize, k: usize) -> LinOpQ {
    let src = monomials(n, k + 1);
    let dst = monomials(n, k);
    let dst_idx = index_of(&dst);
    let mut op = LinOpQ::zeros(dst.len() * n * n, src.len() * n);
    for (a, alpha) in src.iter().enumerate() {
        for i in 0..n {
            let e = alpha.get(i);
            if e == 0 {
                continue;
            }
            let beta = alpha.decremented(i).expect("positive exponent");
            let b = dst_idx[&beta];
            for j in 0..n {
                op.set(b * n * n + j * n + i, a * n + j, Q::from_integer(e.into()));
            }
        }
    }
    op
}

fn check_g(n: usize, g: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    if g.len() != n || g.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("expected a {n}x{n} metric value")));
    }
    for i in 0..n {
        for j in 0..i {
            if g[i][j] != g[j][i] {
                return Err(Error::DimensionMismatch("metric value must be symmetric".into()));
            }
        }
    }
    invert_values(g)
}

/// `Π(B)^a_b = ½(B^a_b + g^{ak} B^l_k g_{lb}) − (1/n) B^k_k δ^a_b` on `End(T)`.
pub fn pi_matrix(n: usize, g: &[Vec<Q>]) -> Result<LinOpQ> {
    let ginv = check_g(n, g)?;
    let half = q(1, 2);
    let inv_n = q(1, n as i64);
    let mut op = LinOpQ::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            op.add_to(row, a * n + b, &half);
            // g^{ak} B^l_k g_{lb}
            for k in 0..n {
                for l in 0..n {
                    let c = &half * &ginv[a][k] * &g[l][b];
                    op.add_to(row, l * n + k, &c);
                }
            }
            if a == b {
                for k in 0..n {
                    op.add_to(row, k * n + k, &(-inv_n.clone()));
                }
            }
        }
    }
    Ok(op)
}

/// `ζ_k = (1⊗Π)∘δ : S^{k+1}T*⊗T → S^kT*⊗V`.
pub fn zeta(n: usize, k: usize, g: &[Vec<Q>]) -> Result<LinOpQ> {
    let pi = pi_matrix(n, g)?;
    let delta = spencer_delta(n, k);
    let blocks = monomials(n, k).len();
    let nn = n * n;
    let mut out = LinOpQ::zeros(blocks * nn, delta.cols());
    let dt = delta.transpose();
    for col in 0..dt.rows() {
        for (r, v) in dt.row(col) {
            let (b, e) = (r / nn, r % nn);
            // column e of Π
            for a in 0..nn {
                let p = pi.get(a, e);
                if !p.is_zero() {
                    out.add_to(b * nn + a, col, &(&p * v));
                }
            }
        }
    }
    Ok(out)
}

pub fn zeta_kernel_dim(n: usize, k: usize, g: &[Vec<Q>]) -> Result<usize> {
    Ok(zeta(n, k, g)?.kernel_dim())
}

/// Basis of `co(g)`: the identity and `g⁻¹Ω` for the elementary skew `Ω`.
pub fn co_basis(n: usize, g: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let ginv = check_g(n, g)?;
    let mut basis = Vec::with_capacity(n * (n - 1) / 2 + 1);
    let mut id = vec![Q::zero(); n * n];
    for i in 0..n {
        id[i * n + i] = Q::one();
    }
    basis.push(id);
    for i in 0..n {
        for j in i + 1..n {
            let mut m = vec![Q::zero(); n * n];
            for a in 0..n {
                // (g⁻¹Ω)^a_b with Ω = E_ij − E_ji
                m[a * n + j] += &ginv[a][i];
                m[a * n + i] -= &ginv[a][j];
            }
            basis.push(m);
        }
    }
    Ok(basis)
}

/// Basis of `gl(n)`.
pub fn gl_basis(n: usize) -> Vec<Vec<Q>> {
    (0..n * n)
        .map(|e| {
            let mut v = vec![Q::zero(); n * n];
            v[e] = Q::one();
            v
        })
        .collect()
}

/// `h^{(i)} = S^{i+1}T*⊗T ∩ S^iT*⊗h` for `h ⊂ End(T)` given by a spanning set.
pub fn prolong(n: usize, h: &[Vec<Q>], i: usize) -> Vec<Vec<Q>> {
    let nn = n * n;
    let ann = if h.is_empty() {
        gl_basis(n)
    } else {
        LinOpQ::from_dense(h).kernel()
    };
    let delta = spencer_delta(n, i);
    let blocks = monomials(n, i).len();
    let mut constraints = LinOpQ::zeros(blocks * ann.len(), delta.cols());
    let dt = delta.transpose();
    for col in 0..dt.rows() {
        for (r, v) in dt.row(col) {
            let (b, e) = (r / nn, r % nn);
            for (t, a) in ann.iter().enumerate() {
                if !a[e].is_zero() {
                    constraints.add_to(b * ann.len() + t, col, &(&a[e] * v));
                }
            }
        }
    }
    constraints.kernel()
}

pub fn prolong_dim(n: usize, h: &[Vec<Q>], i: usize) -> usize {
    prolong(n, h, i).len()
}

/// `ι(p)^j_{kl} = p_k δ^j_l + p_l δ^j_k + sign · g^{ij} p_i g_{kl}` as a vector in `S²T*⊗T`.
/// The embedding uses `sign = −1`; other values serve as negative controls.
pub fn iota(n: usize, g: &[Vec<Q>], ginv: &[Vec<Q>], p: &[Q], sign: i64) -> Vec<Q> {
    let mons = monomials(n, 2);
    let idx = index_of(&mons);
    let s = Q::from_integer(sign.into());
    let mut out = vec![Q::zero(); mons.len() * n];
    for k in 0..n {
        for l in k..n {
            let alpha = MultiIndex::unit(k).plus(&MultiIndex::unit(l));
            let a = idx[&alpha];
            let weight = if k == l { q(1, 2) } else { Q::one() };
            for j in 0..n {
                let mut psi = Q::zero();
                if j == l {
                    psi += &p[k];
                }
                if j == k {
                    psi += &p[l];
                }
                let mut gp = Q::zero();
                for (i, pi) in p.iter().enumerate() {
                    gp += &ginv[i][j] * pi;
                }
                psi += &s * gp * &g[k][l];
                out[a * n + j] = &weight * psi;
            }
        }
    }
    out
}

pub fn iota_check_signed(n: usize, g: &[Vec<Q>], sign: i64) -> Result<bool> {
    let ginv = check_g(n, g)?;
    let z = zeta(n, 1, g)?;
    let mut images = Vec::with_capacity(n);
    for m in 0..n {
        let mut p = vec![Q::zero(); n];
        p[m] = Q::one();
        let v = iota(n, g, &ginv, &p, sign);
        if z.apply(&v).iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
        images.push(v);
    }
    Ok(super::linop::span_rank(&images) == n)
}

/// `ι(T*) ⊂ Ker ζ₁` and `ι` is injective.
pub fn iota_check(n: usize, g: &[Vec<Q>]) -> Result<bool> {
    iota_check_signed(n, g, -1)
}

/// Random invertible symmetric integer matrix with entries in `[-5, 5]`.
pub fn random_g_value<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<Q>> {
    loop {
        let mut g = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v: i64 = rng.gen_range(-5..=5);
                g[i][j] = Q::from_integer(v.into());
                g[j][i] = g[i][j].clone();
            }
        }
        if invert_values(&g).is_ok() {
            return g;
        }
    }
}

pub fn identity_g(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_is_injective() {
        for (n, k) in [(3, 0), (3, 2), (4, 1)] {
            let d = spencer_delta(n, k);
            assert_eq!(d.rank(), d.cols());
        }
        assert_eq!(spencer_delta(3, 2).rank(), 30);
    }

    #[test]
    fn pi_kernel_is_co() {
        let g = identity_g(3);
        let pi = pi_matrix(3, &g).unwrap();
        assert_eq!(pi.kernel_dim(), 4);
        let mut id = vec![Q::zero(); 9];
        for i in 0..3 {
            id[i * 3 + i] = Q::one();
        }
        assert!(pi.apply(&id).iter().all(Zero::is_zero));
        // symmetric trace-free matrices are fixed
        let mut b = vec![Q::zero(); 9];
        b[1] = q(2, 1);
        b[3] = q(2, 1);
        b[0] = q(1, 1);
        b[8] = q(-1, 1);
        assert_eq!(pi.apply(&b), b);
        for v in co_basis(3, &g).unwrap() {
            assert!(pi.apply(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn small_zeta_kernels() {
        assert_eq!(zeta_kernel_dim(3, 2, &identity_g(3)).unwrap(), 0);
        assert_eq!(zeta(3, 2, &identity_g(3)).unwrap().rank(), 30);
        assert_eq!(zeta_kernel_dim(4, 1, &identity_g(4)).unwrap(), 4);
    }

    #[test]
    fn prolongations() {
        let g = identity_g(4);
        let co = co_basis(4, &g).unwrap();
        assert_eq!(prolong_dim(4, &co, 1), 4);
        assert_eq!(prolong_dim(4, &co, 2), 0);
        assert_eq!(prolong_dim(3, &gl_basis(3), 1), 3 * 6);
    }

    #[test]
    fn iota_embedding() {
        assert!(iota_check(3, &identity_g(3)).unwrap());
        assert!(!iota_check_signed(3, &identity_g(3), 1).unwrap());
    }
}

//! Counting differential invariants of conformal structures.
//!
//! Closed-form symbol dimensions and Hilbert function, the Poincaré function,
//! exact symbol-level ranks, and a brute-force orbit-dimension oracle acting on
//! random metric jets.

mod brute;
mod linop;
mod poly;
mod spencer;

pub use brute::{orbit_dim_bruteforce, orbit_generators, random_metric_jet, OrbitSample};
pub use linop::{rank_mod_p, rref, span_rank, Echelon, LinOpQ, MODULUS};
pub use poly::{Poly, RatFunc};
pub use spencer::*;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Q;

/// `C(a, b)` with `C(a, b) = 0` for `b > a`.
pub fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut r: u128 = 1;
    for i in 0..b {
        r = r * u128::from(a - i) / u128::from(i + 1);
    }
    r
}

fn as_i128(v: u128) -> i128 {
    i128::try_from(v).expect("count fits in i128")
}

/// `dim S^k T* = C(n+k−1, k)`.
pub fn dim_sym(n: usize, k: usize) -> u128 {
    if n == 0 {
        return u128::from(k == 0);
    }
    binomial((n + k - 1) as u64, k as u64)
}

/// Symmetric trace-free endomorphisms: `n(n+1)/2 − 1`.
pub fn dim_vertical(n: usize) -> u128 {
    (n * (n + 1) / 2) as u128 - 1
}

pub fn dim_symbol(n: usize, k: usize) -> u128 {
    dim_vertical(n) * dim_sym(n, k)
}

/// `dim S^k T* ⊗ T`; at `k = 1` this is `dim gl = n²`.
pub fn dim_delta(n: usize, k: usize) -> u128 {
    n as u128 * dim_sym(n, k)
}

pub fn dim_diff_group(n: usize, k: usize) -> u128 {
    (1..=k).map(|i| dim_delta(n, i)).sum()
}

/// Dimension of the space of Weyl tensors at a point.
pub fn dim_weyl_space(n: usize) -> u128 {
    if n < 3 {
        return 0;
    }
    ((n - 3) * n * (n + 1) * (n + 2) / 12) as u128
}

/// Dimension of the fiber of metric k-jets at a point: `n(n+1)/2 · C(n+k, k)`.
pub fn metric_fiber_dim(n: usize, k: usize) -> u128 {
    (n * (n + 1) / 2) as u128 * binomial((n + k) as u64, k as u64)
}

fn require_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(format!(
            "conformal structures have no differential invariants for n = {n} < 3"
        )));
    }
    Ok(())
}

/// Number of pure order-`k` differential invariants.
pub fn hilbert(n: usize, k: usize) -> Result<i128> {
    require_dim(n)?;
    let (ni, ki) = (n as i128, k as i128);
    Ok(match (n, k) {
        (_, 0) | (_, 1) => 0,
        (3, 2) => 0,
        (3, 3) => 1,
        (3, 4) => 9,
        (3, _) => ki * ki - 4,
        (_, 2) => (ni.pow(4) - 13 * ni * ni - 12) / 12,
        (_, 3) => ni * (ni.pow(4) + 2 * ni.pow(3) - 5 * ni * ni - 14 * ni - 32) / 24,
        _ => {
            let a = as_i128(binomial((n + k - 1) as u64, (k + 1) as u64));
            let b = as_i128(binomial((n + k - 1) as u64, k as u64));
            ni * (ki - 1) * a / 2 - b
        }
    })
}

/// `trdeg 𝔉_k = Σ_{j ≤ k} H_n(j)`.
pub fn trdeg(n: usize, k: usize) -> Result<i128> {
    (0..=k).map(|j| hilbert(n, j)).sum()
}

/// First order from which `H_n` is a polynomial in `k`.
pub fn polynomial_from(n: usize) -> usize {
    if n == 3 {
        5
    } else {
        4
    }
}

/// `P_n(z) = Σ H_n(k) z^k`, reduced.
///
/// `H_n(k)` is polynomial of degree `n−1` for `k ≥ k₀`, so `(1−z)^n P_n(z)` is a
/// polynomial of degree below `k₀ + n`; it is the truncation of `(1−z)^n` times
/// the partial sum.
pub fn poincare(n: usize) -> Result<RatFunc> {
    require_dim(n)?;
    let top = polynomial_from(n) + n;
    let partial = Poly::new(
        (0..top)
            .map(|k| hilbert(n, k).map(|h| Q::from_integer(h.into())))
            .collect::<Result<Vec<_>>>()?,
    );
    let den = Poly::one_minus_z_pow(n);
    let num = (&den * &partial).truncate(top);
    Ok(RatFunc::new(num, den))
}

/// The closed form `((n+1)nz − 2(n+z)) / (2z(1−z)^n) + n(1/z + z − z³) + (C(n,2)+1)(1−z²)`.
pub fn poincare_general(n: usize) -> RatFunc {
    let ni = n as i64;
    let q = |v: i64| Q::from_integer(v.into());
    let t1 = RatFunc::new(
        Poly::new(vec![q(-2 * ni), q((ni + 1) * ni - 2)]),
        &Poly::monomial(1, q(2)) * &Poly::one_minus_z_pow(n),
    );
    let t2 = RatFunc::new(Poly::from_ints(&[ni, 0, ni, 0, -ni]), Poly::monomial(1, q(1)));
    let c = ni * (ni - 1) / 2 + 1;
    let t3 = RatFunc::poly(Poly::from_ints(&[c, 0, -c]));
    t1.add(&t2).add(&t3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralCheck {
    pub n: usize,
    pub agrees: bool,
    pub general: RatFunc,
    pub computed: RatFunc,
    /// `(k, H_n(k), general series coefficient)` where they differ, `k ≤ 2n + 6`.
    pub mismatches: Vec<(usize, String, String)>,
}

/// Compares the closed-form Poincaré function with the one computed from `H_n`.
pub fn poincare_general_check(n: usize) -> Result<GeneralCheck> {
    let computed = poincare(n)?;
    let general = poincare_general(n);
    let terms = 2 * n + 7;
    let mut mismatches = Vec::new();
    // the general formula has a simple pole at 0 when the 1/z terms do not cancel
    let g_series = general.series(terms);
    for k in 0..terms {
        let h = Q::from_integer(hilbert(n, k)?.into());
        let gk = g_series.as_ref().map(|s| s[k].clone());
        if gk.as_ref() != Some(&h) {
            mismatches.push((
                k,
                crate::scalar::format_rational(&h),
                gk.map_or_else(|| "pole".to_string(), |v| crate::scalar::format_rational(&v)),
            ));
        }
    }
    Ok(GeneralCheck {
        n,
        agrees: general == computed,
        general,
        computed,
        mismatches,
    })
}

/// `H_n(K)` divided by its leading term `(n²−n−2)/2 · K^{n−1}/(n−1)!`.
pub fn asymptotic_check(n: usize, k: usize) -> Result<f64> {
    let h = hilbert(n, k)? as f64;
    let fact: f64 = (1..n).map(|i| i as f64).product();
    let lead = ((n * n - n - 2) as f64 / 2.0) * (k as f64).powi(n as i32 - 1) / fact;
    Ok(h / lead)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub n: usize,
    pub k: usize,
    pub dim_symbol: u128,
    pub dim_delta: u128,
    pub hilbert: i128,
    pub trdeg: i128,
    pub ranks: BTreeMap<String, usize>,
    pub kernel_dims: BTreeMap<String, usize>,
}

/// Largest `ζ_k` domain for which the report includes exact ranks.
pub const RANK_BUDGET: u128 = 1500;

/// Counting data at `(n, k)`; `dim_delta` refers to `Δ_{k+1}`, the group part acting on k-jets.
/// Exact ranks of `δ` and `ζ_k` at `g = δ` are attached when the matrices are small.
pub fn count_report(n: usize, k: usize) -> Result<CountReport> {
    let h = hilbert(n, k)?;
    let t = trdeg(n, k)?;
    let mut ranks = BTreeMap::new();
    let mut kernel_dims = BTreeMap::new();
    if k >= 1 && dim_delta(n, k + 1) <= RANK_BUDGET {
        let z = zeta(n, k, &identity_g(n))?;
        let r = z.rank();
        ranks.insert("spencer_delta".to_string(), spencer_delta(n, k).rank());
        ranks.insert("zeta".to_string(), r);
        kernel_dims.insert("zeta".to_string(), z.cols() - r);
    }
    Ok(CountReport {
        n,
        k,
        dim_symbol: dim_symbol(n, k),
        dim_delta: dim_delta(n, k + 1),
        hilbert: h,
        trdeg: t,
        ranks,
        kernel_dims,
    })
}

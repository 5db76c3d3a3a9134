//! Orbit dimension of a random metric jet under point-fixing diffeomorphisms and
//! conformal rescaling, by exact rank of the infinitesimal generators.
//!
//! The fiber is the space of metric k-jets at the origin. Vector fields of
//! degree `1..=k+1` act through the Lie derivative; constant vector fields move
//! the base point and are left out. Rescalings `x^γ g` with `|γ| ≤ k` complete
//! the tangent space of the orbit.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::linop::{rank_mod_p, Echelon};
use super::{metric_fiber_dim, trdeg};
use crate::error::{Error, Result};
use crate::jet::{monomials, monomials_up_to, Jet, MultiIndex};
use crate::scalar::Q;
use crate::tensor::{lie_derivative_metric, MetricJet, TensorJet};

/// Metric k-jet with value `δ` and integer coefficients in `[−5, 5] \ {0}` in every higher degree.
pub fn random_metric_jet(n: usize, k: usize, seed: u64) -> MetricJet<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mons = monomials_up_to(n, k);
    let mut comps = vec![vec![Jet::zero(n, k); n]; n];
    for i in 0..n {
        for j in i..n {
            let terms = mons.iter().filter(|m| m.degree() > 0).map(|m| {
                let mut v: i64 = rng.gen_range(-5..=4);
                if v >= 0 {
                    v += 1;
                }
                (*m, Q::from_integer(v.into()))
            });
            let mut jet = Jet::from_terms(n, k, terms.collect::<Vec<_>>());
            if i == j {
                jet = jet.add_constant(&Q::from_integer(1.into()));
            }
            comps[i][j] = jet.clone();
            comps[j][i] = jet;
        }
    }
    MetricJet::new(comps, (n, 0), vec![Q::zero(); n]).expect("value δ is positive definite")
}

fn flatten(t: &TensorJet<Q>, n: usize, index: &HashMap<MultiIndex, usize>) -> Vec<(usize, BigInt)> {
    let per = index.len();
    let mut out = Vec::new();
    let mut pair = 0;
    for i in 0..n {
        for j in i..n {
            for (m, c) in t.get(&[i, j]).terms() {
                if !c.is_zero() {
                    debug_assert!(c.is_integer());
                    out.push((pair * per + index[m], c.to_integer()));
                }
            }
            pair += 1;
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

/// Generators of the orbit tangent space as integer vectors in the fiber coordinates.
pub fn orbit_generators(g: &MetricJet<Q>) -> Result<Vec<Vec<(usize, BigInt)>>> {
    let n = g.dim();
    let k = g.order();
    let mons = monomials_up_to(n, k);
    let index: HashMap<MultiIndex, usize> = mons.iter().enumerate().map(|(p, m)| (*m, p)).collect();
    let mut rows = Vec::new();
    for d in 1..=k + 1 {
        for beta in monomials(n, d) {
            for m in 0..n {
                let x: Vec<Jet<Q>> = (0..n)
                    .map(|c| {
                        if c == m {
                            Jet::monomial(n, k + 1, beta, Q::from_integer(1.into()))
                        } else {
                            Jet::zero(n, k + 1)
                        }
                    })
                    .collect();
                rows.push(flatten(&lie_derivative_metric(&x, g)?, n, &index));
            }
        }
    }
    for gamma in &mons {
        let phi = Jet::monomial(n, k, *gamma, Q::from_integer(1.into()));
        rows.push(flatten(&g.tensor().scale(&phi), n, &index));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub fiber_dim: u128,
    pub generators: usize,
    pub rank: usize,
    pub codim: u128,
    pub trdeg: i128,
}

/// Exact orbit dimension at a random metric k-jet.
///
/// The rank is taken modulo a 61-bit prime first. That rank is a lower bound
/// over Q and is exact when it equals the number of generators; otherwise the
/// rank is recomputed by exact integer elimination.
///
/// Fails with [`Error::DegenerateSample`] when the codimension exceeds the
/// generic value, i.e. the sample landed on a special orbit.
pub fn orbit_dim_bruteforce(n: usize, k: usize, seed: u64) -> Result<OrbitSample> {
    let expected = trdeg(n, k)?;
    let g = random_metric_jet(n, k, seed);
    let rows = orbit_generators(&g)?;
    let generators = rows.len();
    // a full modular rank is exact; otherwise fall back to exact elimination
    let mut rank = rank_mod_p(&rows);
    if rank < generators {
        let mut ech = Echelon::new();
        for r in rows {
            ech.insert(r);
        }
        rank = ech.rank();
    }
    let fiber_dim = metric_fiber_dim(n, k);
    let codim = fiber_dim - rank as u128;
    if codim as i128 > expected {
        return Err(Error::DegenerateSample(format!(
            "seed {seed}: orbit codimension {codim} exceeds the generic value {expected} at n = {n}, k = {k}"
        )));
    }
    Ok(OrbitSample {
        n,
        k,
        seed,
        fiber_dim,
        generators,
        rank,
        codim,
        trdeg: expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_two_is_full_rank() {
        let s = orbit_dim_bruteforce(3, 2, 1).unwrap();
        assert_eq!(s.fiber_dim, 60);
        assert_eq!(s.rank, 60);
    }
}

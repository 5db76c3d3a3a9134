//! Invariance of the exported invariants under point transformations and
//! conformal rescaling, on exact random inputs.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::pipeline::evaluate;
use crate::error::Result;
use crate::jet::{monomials, Jet};
use crate::scalar::{q, Q};
use crate::tensor::{conformal_exp_rescale, pullback_metric, DiffeoJet, MetricJet};

/// Relative tolerance `|I' − I| ≤ tol · (1 + |I|)`.
pub const INVARIANCE_TOL: f64 = 1e-7;

fn random_poly(rng: &mut ChaCha8Rng, n: usize, order: usize, lo: usize, hi: usize, den: i64) -> Jet<Q> {
    let mut terms = Vec::new();
    for d in lo..=hi.min(order) {
        for m in monomials(n, d) {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                terms.push((m, q(c, den)));
            }
        }
    }
    Jet::from_terms(n, order, terms)
}

/// Exact metric k-jet: `δ` (or `diag(−1, 1, …)`) plus coefficients in `{−3/4, …, 3/4}`.
pub fn random_exact_metric(n: usize, k: usize, seed: u64, lorentz: bool) -> MetricJet<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = vec![vec![Jet::zero(n, k); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut p = random_poly(&mut rng, n, k, 1, k, 4);
            if i == j {
                p = p.add_constant(&q(if lorentz && i == 0 { -1 } else { 1 }, 1));
            }
            comps[i][j] = p.clone();
            comps[j][i] = p;
        }
    }
    let sig = if lorentz { (n - 1, 1) } else { (n, 0) };
    MetricJet::new(comps, sig, vec![q(0, 1); n]).expect("value is nondegenerate")
}

/// Exact diffeomorphism jet fixing the origin: identity plus a small linear part and random higher terms.
pub fn random_diffeo(n: usize, order: usize, seed: u64) -> DiffeoJet<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let comps = (0..n)
            .map(|a| &Jet::variable(n, order, a) + &random_poly(&mut rng, n, order, 1, order, 8))
            .collect();
        if let Ok(phi) = DiffeoJet::new(comps) {
            return phi;
        }
    }
}

/// Conformal exponent vanishing at the origin, so `e^{2f}` stays exact.
pub fn random_exponent(n: usize, order: usize, seed: u64) -> Jet<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_poly(&mut rng, n, order, 1, order, 4)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceSample {
    pub n: usize,
    pub order: usize,
    pub seed: u64,
    pub compared: usize,
    pub max_residual: f64,
    pub worst: String,
    /// Invariants present on one side only.
    pub unmatched: Vec<String>,
}

impl InvarianceSample {
    pub fn passes(&self, tol: f64) -> bool {
        self.unmatched.is_empty() && self.compared > 0 && self.max_residual <= tol
    }
}

/// Compares every invariant of order `≤ order` of `g` and `φ*(e^{2f} g)`.
pub fn invariance_check(n: usize, order: usize, seed: u64) -> Result<InvarianceSample> {
    let g = random_exact_metric(n, order, seed, false);
    let phi = random_diffeo(n, order + 1, seed.wrapping_add(1 << 32));
    let f = random_exponent(n, order, seed.wrapping_add(2 << 32));
    let transformed = pullback_metric(&phi, &conformal_exp_rescale(&g, &f)?)?;
    let before: BTreeMap<String, f64> = evaluate(&g.to_float(), order)?
        .values
        .into_iter()
        .map(|v| (v.name, v.value))
        .collect();
    let after: BTreeMap<String, f64> = evaluate(&transformed.to_float(), order)?
        .values
        .into_iter()
        .map(|v| (v.name, v.value))
        .collect();
    let mut max_residual = 0.0;
    let mut worst = String::new();
    let mut unmatched = Vec::new();
    let mut compared = 0;
    for (name, a) in &before {
        match after.get(name) {
            Some(b) => {
                compared += 1;
                let r = (a - b).abs() / (1.0 + a.abs());
                if r > max_residual {
                    max_residual = r;
                    worst = name.clone();
                }
            }
            None => unmatched.push(name.clone()),
        }
    }
    unmatched.extend(after.keys().filter(|k| !before.contains_key(*k)).cloned());
    Ok(InvarianceSample {
        n,
        order,
        seed,
        compared,
        max_residual,
        worst,
        unmatched,
    })
}

#![allow(dead_code)]

use confinv::jet::monomials;
use confinv::scalar::q;
use confinv::{Jet, MetricJet, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial of degrees `lo..=hi` with small rational coefficients.
pub fn random_poly(r: &mut ChaCha8Rng, n: usize, order: usize, lo: usize, hi: usize) -> Jet<Q> {
    let mut terms = Vec::new();
    for d in lo..=hi.min(order) {
        for m in monomials(n, d) {
            let c: i64 = r.gen_range(-3..=3);
            if c != 0 {
                terms.push((m, q(c, 4)));
            }
        }
    }
    Jet::from_terms(n, order, terms)
}

/// `δ` (or `diag(-1, 1, ..)` when `lorentz`) plus a random perturbation vanishing at the origin.
pub fn random_metric(seed: u64, n: usize, order: usize, lorentz: bool) -> MetricJet<Q> {
    let mut r = rng(seed);
    let comps: Vec<Vec<Jet<Q>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut p = random_poly(&mut r, n, order, 1, order);
                    if i == j {
                        let v = if lorentz && i == 0 { -1 } else { 1 };
                        p = p.add_constant(&q(v, 1));
                    }
                    p
                })
                .collect()
        })
        .collect();
    let sig = if lorentz { (n - 1, 1) } else { (n, 0) };
    MetricJet::new(comps, sig, vec![q(0, 1); n]).unwrap()
}

pub fn flat(n: usize, order: usize) -> MetricJet<Q> {
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Jet::one(n, order) } else { Jet::zero(n, order) })
                .collect()
        })
        .collect();
    MetricJet::new(comps, (n, 0), vec![q(0, 1); n]).unwrap()
}

/// `c · δ` for a scalar jet `c`.
pub fn conformally_flat(c: &Jet<Q>) -> MetricJet<Q> {
    let n = c.dim();
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { c.clone() } else { Jet::zero(n, c.order()) })
                .collect()
        })
        .collect();
    MetricJet::with_inferred_signature(comps).unwrap()
}

/// Round sphere of radius one in stereographic coordinates: `4 δ / (1 + |x|²)²`.
pub fn round_sphere(n: usize, order: usize) -> MetricJet<Q> {
    let mut r2 = Jet::one(n, order);
    for i in 0..n {
        let x = Jet::variable(n, order, i);
        r2 = &r2 + &(&x * &x);
    }
    let c = r2.powi(-2).unwrap().scale(&q(4, 1));
    conformally_flat(&c)
}

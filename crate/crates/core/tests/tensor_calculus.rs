mod common;

use common::*;
use confinv::scalar::q;
use confinv::tensor::*;
use confinv::{DiffeoJet, Error, Jet, MetricJet, Q};

fn diag(entries: Vec<Jet<Q>>, basepoint: Vec<Q>) -> MetricJet<Q> {
    let n = entries.len();
    let order = entries[0].order();
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { entries[i].clone() } else { Jet::zero(n, order) })
                .collect()
        })
        .collect();
    let neg = entries.iter().filter(|e| e.constant_term() < q(0, 1)).count();
    MetricJet::new(comps, (n - neg, neg), basepoint).unwrap()
}

#[test]
fn inverse_metric_round_trip() {
    let g = random_metric(3, 3, 4, false);
    let inv = inverse_metric(&g).unwrap();
    let m = g.matrix().mul(&inv.as_matrix().unwrap());
    assert_eq!(m, JetMatrix::identity(3, 3, 4));

    // sin² at the basepoint π/2 becomes cos²
    let c = Jet::<Q>::variable(2, 6, 0).cos().unwrap();
    let g = diag(vec![Jet::one(2, 6), &c * &c], vec![q(0, 1), q(0, 1)]);
    let inv = inverse_metric(&g).unwrap();
    assert_eq!(inv.get(&[1, 1]), &(&c * &c).invert().unwrap());
}

#[test]
fn degenerate_metric_rejected() {
    let x = Jet::<Q>::variable(2, 3, 0);
    let comps = vec![vec![Jet::one(2, 3), Jet::zero(2, 3)], vec![Jet::zero(2, 3), x]];
    assert!(MetricJet::new(comps, (1, 0), vec![q(0, 1); 2]).is_err());
}

#[test]
fn christoffel_polar_like() {
    // diag(1, x1²) around x1 = 1
    let t = Jet::<Q>::variable(2, 3, 0).add_constant(&q(1, 1));
    let g = diag(vec![Jet::one(2, 3), &t * &t], vec![q(1, 1), q(0, 1)]);
    let gamma = christoffel(&g).unwrap();
    assert_eq!(gamma.get(&[1, 0, 1]), &t.truncate(2).invert().unwrap());
    assert_eq!(gamma.get(&[0, 1, 1]), &(-t.truncate(2)));
    assert_eq!(gamma.symmetry_residual(), 0.0);

    assert!(christoffel(&g.truncate(0)).is_err());
    assert!(christoffel(&flat(3, 2)).unwrap().is_zero());
}

#[test]
fn sphere_scalar_curvature() {
    let c = Jet::<Q>::variable(2, 6, 0).cos().unwrap();
    let g = diag(vec![Jet::one(2, 6), &c * &c], vec![q(0, 1); 2]);
    let r = scalar_curvature(&g).unwrap();
    assert_eq!(r, Jet::constant(2, 4, q(2, 1)));

    let s2 = round_sphere(2, 5);
    assert_eq!(scalar_curvature(&s2).unwrap(), Jet::constant(2, 3, q(2, 1)));
}

#[test]
fn conformally_flat_2d_scalar_curvature() {
    let x = Jet::<Q>::variable(2, 6, 0);
    let f = &x * &x;
    let g = conformally_flat(&f.scale(&q(2, 1)).exp().unwrap());
    let expected = f.scale(&q(-2, 1)).exp().unwrap().scale(&q(-4, 1)).truncate(4);
    assert_eq!(scalar_curvature(&g).unwrap(), expected);
}

#[test]
fn einstein_schouten() {
    let g = round_sphere(3, 4);
    let ric = ricci(&g).unwrap();
    let p = schouten(&g).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let gij = g.component(i, j).truncate(2);
            assert_eq!(ric.get(&[i, j]), &gij.scale(&q(2, 1)));
            assert_eq!(p.get(&[i, j]), &gij.scale(&q(1, 2)));
        }
    }
    assert!(matches!(schouten(&flat(2, 2)), Err(Error::DimensionTooSmall(_))));
    assert!(schouten(&flat(4, 2)).unwrap().is_zero());
}

#[test]
fn bianchi_identities() {
    for (seed, n) in [(1, 3), (2, 4)] {
        let g = random_metric(seed, n, 4, seed == 2);
        let curv = Curvature::new(&g).unwrap();
        let r = &curv.riemann;
        assert_eq!(r.symmetry_residual(), 0.0);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let s = &(r.get(&[l, i, j, k]) + r.get(&[l, j, k, i])) + r.get(&[l, k, i, j]);
                        assert!(s.is_zero());
                    }
                }
            }
        }
        // second Bianchi: ∇_m R^l_ijk + ∇_i R^l_jmk + ∇_j R^l_mik = 0, new slot first
        let dr = covariant_derivative_with(r, &curv.christoffel).unwrap();
        for l in 0..n {
            for m in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let s = &(dr.get(&[m, l, i, j, k]) + dr.get(&[i, l, j, m, k]))
                                + dr.get(&[j, l, m, i, k]);
                            assert!(s.is_zero());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn metric_is_parallel() {
    let g = random_metric(5, 3, 3, false);
    let dg = covariant_derivative(g.tensor(), &g).unwrap();
    assert!(dg.is_zero());
    assert_eq!(dg.order(), 2);

    let f = random_poly(&mut rng(9), 3, 3, 1, 3);
    let grad = covariant_derivative(&TensorJet::scalar(f.clone()), &g).unwrap();
    for i in 0..3 {
        assert_eq!(grad.get(&[i]), &f.differentiate(i).unwrap());
    }
}

#[test]
fn weyl_is_trace_free_and_vanishes_when_conformally_flat() {
    let g = random_metric(7, 4, 3, false);
    let c = weyl(&g).unwrap();
    for j in 0..4 {
        for k in 0..4 {
            let mut t = Jet::zero(4, 1);
            for i in 0..4 {
                t = &t + c.get(&[i, i, j, k]);
            }
            assert!(t.is_zero());
        }
    }
    let x = Jet::<Q>::variable(4, 5, 0);
    let y = Jet::<Q>::variable(4, 5, 1);
    let cf = conformally_flat(&(&x * &y).scale(&q(2, 1)).exp().unwrap());
    assert!(weyl(&cf).unwrap().is_zero());
    assert!(weyl(&round_sphere(3, 3)).unwrap().is_zero());
}

#[test]
fn product_of_spheres_has_nonzero_weyl() {
    let n = 4;
    let order = 3;
    let vars: Vec<Jet<Q>> = (0..n).map(|i| Jet::variable(n, order, i)).collect();
    let factor = |a: usize| {
        let r2 = &(&Jet::one(n, order) + &(&vars[a] * &vars[a])) + &(&vars[a + 1] * &vars[a + 1]);
        r2.powi(-2).unwrap().scale(&q(4, 1))
    };
    let (f1, f2) = (factor(0), factor(2));
    let g = diag(vec![f1.clone(), f1, f2.clone(), f2], vec![q(0, 1); 4]);
    let c = weyl(&g).unwrap();
    let s = norm_sq(&c, &g).unwrap();
    // |Rm|² − 2|Ric|² + R²/3 = 8 − 8 + 16/3 for the unit S²×S²
    assert_eq!(s.constant_term(), q(16, 3));
}

#[test]
fn weyl_conformal_invariance() {
    for (seed, n) in [(11u64, 4usize), (12, 5)] {
        let order = if n == 4 { 4 } else { 3 };
        let g = random_metric(seed, n, order, false);
        let f = random_poly(&mut rng(seed + 100), n, order, 1, order);
        let gg = conformal_exp_rescale(&g, &f).unwrap();
        assert_eq!(weyl(&g).unwrap(), weyl(&gg).unwrap());
    }
}

#[test]
fn cotton_properties() {
    let g = random_metric(21, 3, 4, false);
    let c = cotton(&g).unwrap();
    assert!(!c.is_zero());
    assert_eq!(c.symmetry_residual(), 0.0);
    let ginv = inverse_metric(&g).unwrap();
    for i in 0..3 {
        let mut t = Jet::zero(3, 1);
        for j in 0..3 {
            for k in 0..3 {
                t = &t + &(ginv.get(&[j, k]) * c.get(&[i, j, k]));
            }
        }
        assert!(t.is_zero());
    }
    let f = random_poly(&mut rng(22), 3, 4, 1, 4);
    let gg = conformal_exp_rescale(&g, &f).unwrap();
    assert_eq!(cotton(&gg).unwrap(), c);

    assert!(cotton(&round_sphere(3, 4)).unwrap().is_zero());
    assert!(matches!(cotton(&flat(4, 3)), Err(Error::WrongDimension(_))));
    assert!(matches!(cotton(&flat(3, 2)), Err(Error::OrderTooLow(_))));
}

#[test]
fn schouten_derivative_matches_finite_differences() {
    let g = random_metric(31, 3, 5, false).to_float();
    let p = schouten(&g).unwrap();
    let dp = covariant_derivative(&p, &g).unwrap();
    // shift the jet to ±h along each axis and compare the transported values
    let h = 1e-5;
    let gamma = christoffel(&g).unwrap();
    for m in 0..3 {
        let at = |s: f64| {
            let mut pt = vec![0.0; 3];
            pt[m] = s;
            pt
        };
        for j in 0..3 {
            for k in 0..3 {
                let dd = (p.get(&[j, k]).eval(&at(h)) - p.get(&[j, k]).eval(&at(-h))) / (2.0 * h);
                let mut conn = 0.0;
                for b in 0..3 {
                    conn -= gamma.get(&[b, m, j]).constant_term() * p.get(&[b, k]).constant_term();
                    conn -= gamma.get(&[b, m, k]).constant_term() * p.get(&[j, b]).constant_term();
                }
                let got = dp.get(&[m, j, k]).constant_term();
                assert!((dd + conn - got).abs() < 1e-7, "{dd} {conn} {got}");
            }
        }
    }
}

#[test]
fn norm_sq_weights() {
    let g = random_metric(41, 4, 3, false);
    assert_eq!(norm_sq(g.tensor(), &g).unwrap(), Jet::constant(4, 3, q(4, 1)));
    let lam = Jet::constant(4, 3, q(4, 1));
    let gl = g.conformal_rescale(&lam).unwrap();
    let a = norm_sq(&weyl(&g).unwrap(), &g).unwrap();
    let b = norm_sq(&weyl(&gl).unwrap(), &gl).unwrap();
    assert!(!a.is_zero());
    assert_eq!(b, a.scale(&q(1, 16)));

    let g3 = random_metric(42, 3, 4, false);
    let g3l = g3.conformal_rescale(&Jet::constant(3, 4, q(4, 1))).unwrap();
    let a = norm_sq(&cotton(&g3).unwrap(), &g3).unwrap();
    let b = norm_sq(&cotton(&g3l).unwrap(), &g3l).unwrap();
    assert_eq!(b, a.scale(&q(1, 64)));

    let z = TensorJet::<Q>::zero(4, 2, vec![Slot::Down, Slot::Up]);
    assert!(norm_sq(&z, &g).unwrap().is_zero());
    assert!(matches!(norm_sq(&z, &flat(3, 2)), Err(Error::RankMismatch(_))));
}

#[test]
fn hodge_star() {
    let d = flat(3, 2);
    let mut w = TensorJet::<Q>::zero(3, 2, vec![Slot::Down, Slot::Down]);
    w.set(&[0, 1], Jet::one(3, 2));
    w.set(&[1, 0], -Jet::one(3, 2));
    let s = hodge_star_2form(&w, &d).unwrap();
    assert_eq!(s.get(&[2]), &Jet::one(3, 2));
    assert!(s.get(&[0]).is_zero() && s.get(&[1]).is_zero());

    let mut r = rng(51);
    let omega_vals: Vec<Jet<Q>> = (0..3).map(|_| random_poly(&mut r, 3, 2, 0, 2)).collect();
    let omega = TensorJet::from_fn(3, vec![Slot::Down, Slot::Down], |idx| match (idx[0], idx[1]) {
        (0, 1) => omega_vals[0].clone(),
        (1, 0) => -&omega_vals[0],
        (0, 2) => omega_vals[1].clone(),
        (2, 0) => -&omega_vals[1],
        (1, 2) => omega_vals[2].clone(),
        (2, 1) => -&omega_vals[2],
        _ => Jet::zero(3, 2),
    });
    let lorentz = diag(
        vec![Jet::constant(3, 2, q(-1, 1)), Jet::one(3, 2), Jet::one(3, 2)],
        vec![q(0, 1); 3],
    );
    for (g, sign) in [(d, 1), (lorentz, -1)] {
        let back = hodge_star_1form(&hodge_star_2form(&omega, &g).unwrap(), &g).unwrap();
        let want = omega.scale(&Jet::constant(3, 2, q(sign, 1)));
        assert_eq!(back.components(), want.components());
    }
    assert!(matches!(hodge_star_2form(&omega, &flat(4, 2)), Err(Error::WrongDimension(_))));
}

#[test]
fn lie_derivative() {
    let n = 3;
    let order = 3;
    let d = flat(n, order);
    let x: Vec<Jet<Q>> = (0..n).map(|i| Jet::variable(n, order + 1, i)).collect();
    let zero = Jet::zero(n, order + 1);
    let rot = vec![-&x[1], x[0].clone(), zero.clone()];
    assert!(lie_derivative_metric(&rot, &d).unwrap().is_zero());

    let dil = vec![x[0].clone(), zero.clone(), zero.clone()];
    let l = lie_derivative_metric(&dil, &d).unwrap();
    assert_eq!(l.order(), order);
    for i in 0..n {
        for j in 0..n {
            let want = if (i, j) == (0, 0) { q(2, 1) } else { q(0, 1) };
            assert_eq!(l.get(&[i, j]), &Jet::constant(n, order, want));
        }
    }

    let g = random_metric(61, n, order, false);
    let mut r = rng(62);
    let a: Vec<Jet<Q>> = (0..n).map(|_| random_poly(&mut r, n, order + 1, 1, order + 1)).collect();
    let b: Vec<Jet<Q>> = (0..n).map(|_| random_poly(&mut r, n, order + 1, 1, order + 1)).collect();
    let sum: Vec<Jet<Q>> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
    let la = lie_derivative_metric(&a, &g).unwrap();
    let lb = lie_derivative_metric(&b, &g).unwrap();
    let ls = lie_derivative_metric(&sum, &g).unwrap();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(ls.get(&[i, j]), &(la.get(&[i, j]) + lb.get(&[i, j])));
        }
    }
    assert_eq!(ls.symmetry_residual(), 0.0);
    let short: Vec<Jet<Q>> = (0..n).map(|i| Jet::variable(n, 1, i)).collect();
    assert!(matches!(lie_derivative_metric(&short, &g), Err(Error::OrderTooLow(_))));
}

#[test]
fn pullback_linear_and_functorial() {
    let n = 3;
    let order = 3;
    let a = [[2, 1, 0], [0, 1, -1], [1, 0, 3]];
    let lin = DiffeoJet::new(
        (0..n)
            .map(|r| {
                Jet::from_terms(
                    n,
                    order + 1,
                    (0..n).map(|c| (confinv::MultiIndex::unit(c), q(a[r][c], 1))),
                )
            })
            .collect(),
    )
    .unwrap();
    let pd = pullback_metric(&lin, &flat(n, order)).unwrap();
    for i in 0..n {
        for j in 0..n {
            let ata: i64 = (0..n).map(|k| a[k][i] * a[k][j]).sum();
            assert_eq!(pd.component(i, j), &Jet::constant(n, order, q(ata, 1)));
        }
    }

    let g = random_metric(71, n, order, false);
    assert_eq!(pullback_metric(&DiffeoJet::identity(n, order + 1), &g).unwrap(), g);
    let mut r = rng(72);
    let diffeo = |r: &mut rand_chacha::ChaCha8Rng| {
        let comps = (0..n)
            .map(|i| &Jet::variable(n, order + 1, i) + &random_poly(r, n, order + 1, 2, order + 1))
            .collect();
        DiffeoJet::new(comps).unwrap()
    };
    let phi = diffeo(&mut r);
    let psi = diffeo(&mut r);
    let lhs = pullback_metric(&phi.compose(&psi).unwrap(), &g).unwrap();
    let rhs = pullback_metric(&psi, &pullback_metric(&phi, &g).unwrap()).unwrap();
    assert_eq!(lhs, rhs);

    // curvature is natural
    let rg = riemann(&g).unwrap();
    let pulled = pullback_tensor(&phi, &rg).unwrap();
    assert_eq!(riemann(&pullback_metric(&phi, &g).unwrap()).unwrap(), pulled.truncate(order - 2));

    let sing = DiffeoJet::<Q>::new(vec![Jet::variable(2, 2, 0), Jet::variable(2, 2, 0)]);
    assert!(matches!(sing, Err(Error::SingularJacobian)));
}

mod common;

use common::*;
use confinv::jet::AnyJet;
use confinv::scalar::q;
use confinv::{Backend, Error, Jet, MultiIndex, Q};
use proptest::prelude::*;

fn x(dim: usize, order: usize, i: usize) -> Jet<Q> {
    Jet::variable(dim, order, i)
}

fn m(e: &[u32]) -> MultiIndex {
    MultiIndex::from_exponents(e).unwrap()
}

#[test]
fn product_examples() {
    let one = Jet::<Q>::one(1, 2);
    let a = &one + &x(1, 2, 0);
    let b = &one - &x(1, 2, 0);
    assert_eq!(&a * &b, Jet::from_terms(1, 2, [(m(&[0]), q(1, 1)), (m(&[2]), q(-1, 1))]));
    assert_eq!(&a * &one, a);
    let e = Jet::from_terms(1, 2, [(m(&[0]), q(1, 1)), (m(&[1]), q(1, 1)), (m(&[2]), q(1, 2))]);
    let want = Jet::from_terms(1, 2, [(m(&[0]), q(1, 1)), (m(&[1]), q(2, 1)), (m(&[2]), q(2, 1))]);
    assert_eq!(&e * &e, want);
}

#[test]
fn product_truncates_to_lower_order() {
    let p = &x(2, 3, 0) * &x(2, 1, 1);
    assert_eq!(p.order(), 1);
    assert!(p.is_zero());
    assert!(matches!(x(2, 2, 0).checked_mul(&x(3, 2, 0)), Err(Error::DimensionMismatch(_))));
}

#[test]
fn inverse_examples() {
    assert_eq!(Jet::<Q>::one(2, 3).invert().unwrap(), Jet::one(2, 3));
    let geo = (&Jet::one(1, 3) - &x(1, 3, 0)).invert().unwrap();
    let want = Jet::from_terms(1, 3, (0..=3).map(|d| (m(&[d]), q(1, 1))));
    assert_eq!(geo, want);
    let inv = (&Jet::constant(1, 1, q(2, 1)) + &x(1, 1, 0)).invert().unwrap();
    assert_eq!(inv, Jet::from_terms(1, 1, [(m(&[0]), q(1, 2)), (m(&[1]), q(-1, 4))]));
    assert!(matches!(x(1, 2, 0).invert(), Err(Error::ZeroConstantTerm(_))));
}

#[test]
fn power_examples() {
    assert_eq!(Jet::<Q>::one(2, 4).power(&q(7, 3)).unwrap(), Jet::one(2, 4));
    let s = (&Jet::one(1, 2) + &x(1, 2, 0)).power(&q(1, 2)).unwrap();
    let want = Jet::from_terms(1, 2, [(m(&[0]), q(1, 1)), (m(&[1]), q(1, 2)), (m(&[2]), q(-1, 8))]);
    assert_eq!(s, want);
    assert_eq!(Jet::constant(1, 0, q(4, 1)).power(&q(1, 2)).unwrap(), Jet::constant(1, 0, q(2, 1)));
    assert!(matches!(
        Jet::constant(1, 0, q(-1, 1)).power(&q(1, 2)),
        Err(Error::NonPositiveConstantTerm(_))
    ));
}

#[test]
fn irrational_root_promotes_to_float() {
    let two = &Jet::constant(1, 2, q(2, 1)) + &x(1, 2, 0);
    assert!(matches!(two.power(&q(1, 2)), Err(Error::IrrationalRoot(_))));
    let promoted = two.power_promoting(&q(1, 2)).unwrap();
    assert_eq!(promoted.backend(), Backend::Float);
    let AnyJet::Float(f) = promoted else { unreachable!() };
    assert!((f.constant_term() - 2f64.sqrt()).abs() < 1e-15);
    assert!((&f * &f).approx_eq(&two.to_float(), 1e-12));
}

#[test]
fn derivative_examples() {
    let x1 = x(2, 3, 0);
    let x2 = x(2, 3, 1);
    let d = (&x1 * &x1).truncate(2).differentiate(0).unwrap();
    assert_eq!(d, x(2, 1, 0).scale(&q(2, 1)));
    assert!(x1.differentiate(1).unwrap().is_zero());
    let a = &(&x1 * &x2) + &(&(&x1 * &x1) * &x1);
    let want = &x(2, 2, 1) + &(&x(2, 2, 0) * &x(2, 2, 0)).scale(&q(3, 1));
    let got = a.differentiate(0).unwrap();
    assert_eq!(got.order(), 2);
    assert_eq!(got, want);
    assert!(matches!(Jet::<Q>::one(2, 0).differentiate(0), Err(Error::OrderTooLow(_))));
}

#[test]
fn composition_examples() {
    let sq = &x(1, 2, 0) * &x(1, 2, 0);
    let sum = &x(2, 2, 0) + &x(2, 2, 1);
    assert_eq!(sq.compose(std::slice::from_ref(&sum)).unwrap(), &sum * &sum);
    let a = random_poly(&mut rng(3), 3, 4, 0, 4);
    let id: Vec<_> = (0..3).map(|i| x(3, 4, i)).collect();
    assert_eq!(a.compose(&id).unwrap(), a);
    let exp = x(1, 2, 0).exp().unwrap();
    let arg = &x(2, 2, 0) + &(&x(2, 2, 1) * &x(2, 2, 1));
    let want = Jet::from_terms(
        2,
        2,
        [(m(&[0, 0]), q(1, 1)), (m(&[1, 0]), q(1, 1)), (m(&[2, 0]), q(1, 2)), (m(&[0, 2]), q(1, 1))],
    );
    assert_eq!(exp.compose(&[arg]).unwrap(), want);
    assert!(matches!(sq.compose(&[Jet::one(1, 2)]), Err(Error::NonzeroConstantTerm(0))));
    assert!(matches!(sq.compose(&[x(2, 2, 0), x(2, 2, 1)]), Err(Error::ArityMismatch { .. })));
}

fn jet(seed: u64, n: usize, order: usize) -> Jet<Q> {
    random_poly(&mut rng(seed), n, order, 0, order)
}

fn vanishing(seed: u64, n: usize, order: usize) -> Vec<Jet<Q>> {
    (0..n).map(|i| random_poly(&mut rng(seed * 31 + i as u64), n, order, 1, order)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distributive(seed in 0u64..10_000, n in 1usize..4, order in 0usize..4) {
        let (a, b, c) = (jet(seed, n, order), jet(seed + 1, n, order), jet(seed + 2, n, order));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn inverse_and_square_root(seed in 0u64..10_000, n in 1usize..4, order in 0usize..5) {
        let a = random_poly(&mut rng(seed), n, order, 1, order).add_constant(&q(9, 4));
        prop_assert_eq!(&a * &a.invert().unwrap(), Jet::one(n, order));
        let r = a.power(&q(1, 2)).unwrap();
        prop_assert_eq!(&r * &r, a.clone());
        prop_assert_eq!(a.power(&q(-3, 1)).unwrap(), a.powi(-3).unwrap());
    }

    #[test]
    fn leibniz(seed in 0u64..10_000, n in 1usize..4, order in 1usize..5, i in 0usize..3) {
        let i = i % n;
        let (a, b) = (jet(seed, n, order), jet(seed + 7, n, order));
        let lhs = (&a * &b).differentiate(i).unwrap();
        let rhs = &(&a.differentiate(i).unwrap() * &b) + &(&a * &b.differentiate(i).unwrap());
        prop_assert_eq!(lhs, rhs.truncate(order - 1));
    }

    #[test]
    fn derivatives_commute(seed in 0u64..10_000, order in 2usize..5) {
        let a = jet(seed, 3, order);
        let d01 = a.differentiate(0).unwrap().differentiate(1).unwrap();
        let d10 = a.differentiate(1).unwrap().differentiate(0).unwrap();
        prop_assert_eq!(d01, d10);
    }

    #[test]
    fn composition_is_associative(seed in 0u64..10_000, n in 1usize..4, order in 1usize..4) {
        let a = jet(seed, n, order);
        let phi = vanishing(seed + 1, n, order);
        let psi = vanishing(seed + 2, n, order);
        let phi_psi: Vec<_> = phi.iter().map(|p| p.compose(&psi).unwrap()).collect();
        prop_assert_eq!(a.compose(&phi).unwrap().compose(&psi).unwrap(), a.compose(&phi_psi).unwrap());
    }
}

use confinv::metric_io::{build_metric_jet, parse_expr, parse_metric, AnyMetric, Expr, Func};
use confinv::scalar::q;
use confinv::{Jet, Q};
use proptest::prelude::*;

fn coords() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-5i64..=5, 1i64..=4).prop_map(|(a, b)| Expr::Num(q(a, b))),
        (0usize..2).prop_map(Expr::Var),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 0i64..4).prop_map(|(a, e)| Expr::Pow(Box::new(a), e)),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Call(Func::Sin, Box::new(a))),
            inner.prop_map(|a| Expr::Call(Func::Cos, Box::new(a))),
        ]
    })
}

/// Parse and print once so the tree is in the canonical shape the parser produces.
fn canonical(e: &Expr) -> Expr {
    parse_expr(&e.display(&coords()).to_string(), &coords()).unwrap()
}

fn jet(e: &Expr, bp: &[Q]) -> Option<Jet<Q>> {
    e.eval::<Q>(bp, 4).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(e in expr()) {
        let c = canonical(&e);
        prop_assert_eq!(canonical(&c), c);
    }

    #[test]
    fn expansion_is_a_ring_homomorphism(a in expr(), b in expr()) {
        let bp = [q(0, 1), q(0, 1)];
        if let (Some(ja), Some(jb)) = (jet(&a, &bp), jet(&b, &bp)) {
            let prod = Expr::Mul(Box::new(a.clone()), Box::new(b.clone()));
            let sum = Expr::Add(Box::new(a), Box::new(b));
            prop_assert_eq!(jet(&prod, &bp).unwrap(), &ja * &jb);
            prop_assert_eq!(jet(&sum, &bp).unwrap(), &ja + &jb);
        }
    }
}

#[test]
fn constant_and_monomial() {
    let c = coords();
    let one = parse_expr("1", &c).unwrap().eval::<Q>(&[q(3, 1), q(-1, 2)], 2).unwrap();
    assert_eq!(one, Jet::one(2, 2));
    let x2 = parse_expr("x^2", &c).unwrap().eval::<Q>(&[q(0, 1), q(0, 1)], 2).unwrap();
    let x = Jet::<Q>::variable(2, 2, 0);
    assert_eq!(x2, &x * &x);
}

#[test]
fn shifted_basepoint() {
    // x^2 at x = 2 is 4 + 4t + t^2
    let c = coords();
    let j = parse_expr("x^2", &c).unwrap().eval::<Q>(&[q(2, 1), q(0, 1)], 3).unwrap();
    let t = Jet::<Q>::variable(2, 3, 0);
    assert_eq!(j, &(&t * &t) + &t.scale(&q(4, 1)).add_constant(&q(4, 1)));
}

#[test]
fn product_of_spheres_file() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/s2xs2.metric")).unwrap();
    let spec = parse_metric(&text).unwrap();
    assert_eq!(spec.dim, 4);
    assert!(matches!(build_metric_jet(&spec).unwrap(), AnyMetric::Exact(_)));
}

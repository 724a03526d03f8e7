use geoweb::expr::{Expr, ExprError, Expression, Func};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..2000).prop_map(|n| Expr::Num(n as f64 / 100.0)),
        Just(Expr::Var),
        Just(Expr::Const(geoweb::expr::Constant::Pi)),
    ]
}

/// Arbitrary trees over the full grammar.
fn any_tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        let b = |x: Expr| Box::new(x);
        prop_oneof![
            inner.clone().prop_map(move |x| Expr::Neg(b(x))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), prop_oneof![Just(2.0), Just(3.0), Just(0.5), Just(-1.0)])
                .prop_map(move |(x, p)| Expr::Pow(b(x), p)),
            (inner, 0..Func::ALL.len()).prop_map(move |(x, f)| Expr::Call(Func::ALL[f], b(x))),
        ]
    })
}

/// Trees that are smooth and total on `[-1, 1]`.
fn smooth_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0u32..300).prop_map(|n| Expr::Num(n as f64 / 100.0)), Just(Expr::Var)];
    leaf.prop_recursive(3, 16, 2, |inner| {
        let b = |x: Expr| Box::new(x);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            inner.clone().prop_map(move |x| Expr::Pow(b(x), 2.0)),
            (inner, prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Tanh)])
                .prop_map(move |(x, f)| Expr::Call(f, b(x))),
        ]
    })
}

proptest! {
    #[test]
    fn unparse_then_parse_is_identity(root in any_tree()) {
        let e = Expression::from_ast(root, "u");
        let back = Expression::parse(&e.unparse(), "u").unwrap();
        prop_assert_eq!(back.ast(), e.ast());
    }

    #[test]
    fn jets_match_central_differences(root in smooth_tree(), x in -1.0f64..1.0) {
        let e = Expression::from_ast(root, "u");
        let h = 1e-4;
        let j = e.eval_jet3(x).unwrap();
        let (jp, jm) = (e.eval_jet3(x + h).unwrap(), e.eval_jet3(x - h).unwrap());
        let scale = 1.0 + j.value.abs() + j.d1.abs() + j.d2.abs() + j.d3.abs();
        prop_assert!((j.d1 - (jp.value - jm.value) / (2.0 * h)).abs() <= 1e-6 * scale);
        prop_assert!((j.d2 - (jp.d1 - jm.d1) / (2.0 * h)).abs() <= 1e-6 * scale);
        prop_assert!((j.d3 - (jp.d2 - jm.d2) / (2.0 * h)).abs() <= 1e-6 * scale);
        let fd2 = (jp.value - 2.0 * j.value + jm.value) / (h * h);
        prop_assert!((j.d2 - fd2).abs() <= 1e-5 * scale);
    }

    #[test]
    fn constants_have_zero_derivatives(n in -1000i32..1000, x in -5.0f64..5.0) {
        let j = Expression::parse(&format!("{}", n as f64 / 7.0), "u").unwrap().eval_jet3(x).unwrap();
        prop_assert_eq!((j.d1, j.d2, j.d3), (0.0, 0.0, 0.0));
    }
}

#[test]
fn sinh_jet_against_reference_values() {
    // sinh 1 and cosh 1 to 16 digits.
    let (s, c) = (1.1752011936438014, 1.5430806348152437);
    let j = Expression::parse("sinh(u)", "u").unwrap().eval_jet3(1.0).unwrap();
    for (got, want) in [(j.value, s), (j.d1, c), (j.d2, s), (j.d3, c)] {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn polynomial_and_identity_jets() {
    let j = Expression::parse("u^2", "u").unwrap().eval_jet3(3.0).unwrap();
    assert_eq!((j.value, j.d1, j.d2, j.d3), (9.0, 6.0, 2.0, 0.0));
    let j = Expression::parse("u", "u").unwrap().eval_jet3(2.0).unwrap();
    assert_eq!((j.value, j.d1, j.d2, j.d3), (2.0, 1.0, 0.0, 0.0));
}

#[test]
fn example_trees() {
    let e = Expression::parse("sinh(u)", "u").unwrap();
    assert_eq!(e.ast(), &Expr::Call(Func::Sinh, Box::new(Expr::Var)));
    let e = Expression::parse("u^2 + 3*u", "u").unwrap();
    let want = Expr::Add(
        Box::new(Expr::Pow(Box::new(Expr::Var), 2.0)),
        Box::new(Expr::Mul(Box::new(Expr::Num(3.0)), Box::new(Expr::Var))),
    );
    assert_eq!(e.ast(), &want);
}

#[test]
fn errors_carry_position_and_subexpression() {
    match Expression::parse("sin(v", "v") {
        Err(ExprError::Syntax { position, message }) => {
            assert_eq!(position, 5);
            assert!(message.contains("expected `)`"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(Expression::parse("sin(w)", "v"), Err(ExprError::UnknownIdentifier { .. })));
    match Expression::parse("log(u - 2)", "u").unwrap().eval(1.0) {
        Err(ExprError::Domain { subexpression, .. }) => assert!(subexpression.contains("log")),
        other => panic!("{other:?}"),
    }
}

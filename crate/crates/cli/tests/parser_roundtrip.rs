//! Printing an expression and parsing it back gives the same tree.

use gwt_cli::config::RegistryConfig;
use gwt_cli::expr::{parse_expression, AddOp, BracketKind, Expr, Scope};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn scope() -> Scope {
    let text = include_str!("../../../configs/single_mode.json");
    let mut scope = RegistryConfig::from_json(text).unwrap().load().unwrap().scope;
    scope.scalars.insert("k".into());
    scope
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..50, 1i64..9).prop_map(|(n, d)| Expr::Number(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        Just(Expr::Imag),
        Just(Expr::Scalar("k".into())),
        prop::sample::select(vec!["a", "a†"]).prop_map(|s| Expr::Symbol(s.into())),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            (inner.clone(), prop::collection::vec((any::<bool>(), inner.clone()), 1..3)).prop_map(|(f, rest)| {
                Expr::Sum(
                    Box::new(f),
                    rest.into_iter().map(|(p, e)| (if p { AddOp::Plus } else { AddOp::Minus }, e)).collect(),
                )
            }),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Product),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Bracket {
                kind: BracketKind::Comm,
                lhs: Box::new(l),
                rhs: Box::new(r),
            }),
            (prop::sample::select(vec!["N", "A", "W", "qp"]), inner.clone())
                .prop_map(|(n, b)| Expr::Order { name: n.into(), body: Box::new(b) }),
            (inner, 0u32..5).prop_map(|(b, order)| Expr::Exp { body: Box::new(b), order }),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        let back = parse_expression(&text, &scope());
        prop_assert!(back.is_ok(), "{text}: {:?}", back.err());
        prop_assert_eq!(back.unwrap(), e);
    }
}

#[test]
fn unicode_and_ascii_daggers_agree() {
    let s = scope();
    assert_eq!(parse_expression("a^+ * a", &s).unwrap(), parse_expression("a† * a", &s).unwrap());
}

use proptest::prelude::*;
use sullivan::dsl::{self, Expr};
use sullivan_core::Q;

fn var() -> impl Strategy<Value = Expr> {
    prop_oneof![Just("w4"), Just("v2"), Just("x"), Just("c"), Just("yb")]
        .prop_map(|s| Expr::Var(s.to_string(), Default::default()))
}

fn num() -> impl Strategy<Value = Expr> {
    (0i64..20, 1i64..5).prop_map(|(n, d)| Expr::Num(Q::new(n.into(), d.into())))
}

fn expr() -> impl Strategy<Value = Expr> {
    prop_oneof![var(), num()].prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner, 1u32..4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(dsl::parse_expr(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn printed_documents_parse_back(es in proptest::collection::vec(expr(), 1..4), n in 2u32..9) {
        let mut text = String::from("algebra A { gen w4 : 4; gen v2 : 2; gen x : 6 trunc; gen yb : 2; }\n");
        text.push_str(&format!("twist T over sphere {n} on A gen s {{\n"));
        for e in &es {
            text.push_str(&format!("  theta w4 = {e};\n"));
        }
        text.push_str("}\n");
        let doc = dsl::parse(&text).unwrap();
        let printed = doc.to_string();
        prop_assert_eq!(dsl::parse(&printed).unwrap(), doc.clone());
        prop_assert_eq!(dsl::parse(&printed).unwrap().to_string(), printed);
    }
}

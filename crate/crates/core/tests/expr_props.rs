use ompath::expr::{parse_expr, BinOp, Expr, Func};
use proptest::prelude::*;

/// Random trees that stay away from poles: divisors and log arguments are
/// shifted to be at least 1.
fn tame_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (-3.0..3.0f64).prop_map(|c| Expr::Const((c * 8.0).round() / 8.0)),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        let safe = |e: Expr| Expr::add(Expr::constant(1.0), Expr::pow(e, 2));
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expr::div(a, safe(b))),
            (inner.clone(), 0..4i32).prop_map(|(a, n)| Expr::pow(a, n)),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Tanh, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Tanh, a))),
            inner.prop_map(move |a| Expr::call(Func::Log, safe(a))),
        ]
    })
}

fn central_difference(e: &Expr, z: f64, h: f64) -> Option<f64> {
    let p = e.eval(z + h).ok()?;
    let m = e.eval(z - h).ok()?;
    let p2 = e.eval(z + 2.0 * h).ok()?;
    let m2 = e.eval(z - 2.0 * h).ok()?;
    Some((8.0 * (p - m) - (p2 - m2)) / (12.0 * h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symbolic_derivative_matches_finite_differences(e in tame_expr().prop_filter("depth", |e| e.depth() <= 6)) {
        let de = e.differentiate();
        for k in 0..10 {
            let z = -1.8 + 0.4 * k as f64;
            let (Ok(v), Some(fd)) = (de.eval(z), central_difference(&e, z, 1e-5)) else { continue };
            if v.abs() > 1e4 || !fd.is_finite() {
                continue;
            }
            prop_assert!((v - fd).abs() <= 1e-6 * (1.0 + v.abs()), "{e} at {z}: {v} vs {fd}");
        }
    }

    #[test]
    fn print_parse_round_trip_is_bit_exact(e in tame_expr()) {
        let back = parse_expr(&e.to_string()).unwrap();
        for k in 0..7 {
            let z = -1.5 + 0.5 * k as f64;
            match (e.eval(z), back.eval(z)) {
                (Ok(a), Ok(b)) => prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())),
                (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
            }
        }
    }

    #[test]
    fn simplification_preserves_values(e in tame_expr()) {
        let s = e.simplify();
        prop_assert!(s.size() <= e.size());
        for k in 0..7 {
            let z = -1.5 + 0.5 * k as f64;
            if let (Ok(a), Ok(b)) = (e.eval(z), s.eval(z)) {
                if a.is_finite() {
                    let ulp = f64::EPSILON * a.abs().max(f64::MIN_POSITIVE);
                    prop_assert!((a - b).abs() <= ulp, "{e} -> {s} at {z}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn parses_grammar_examples() {
    let cases: [(&str, f64, f64); 8] = [
        ("z - z^3", 2.0, -6.0),
        ("-z", 1.5, -1.5),
        ("2*z^2 - 3*z + 1", 2.0, 3.0),
        ("sin(z) + cos(z)", 0.0, 1.0),
        ("z^-1", 4.0, 0.25),
        ("z^(-2)", 2.0, 0.25),
        ("-z^2", 3.0, -9.0),
        ("exp(log(z)) / (1 + tanh(0))", 5.0, 5.0),
    ];
    for (src, z, want) in cases {
        let got = parse_expr(src).unwrap().eval(z).unwrap();
        assert!((got - want).abs() < 1e-12, "{src}: {got}");
    }
}

#[test]
fn rejects_malformed_input() {
    for src in ["", "z +", "z^1.5", "foo(z)", "(z", "z z", "x"] {
        assert!(parse_expr(src).is_err(), "{src}");
    }
}

#[test]
fn domain_errors_are_reported() {
    assert!(parse_expr("1/z").unwrap().eval(0.0).is_err());
    assert!(parse_expr("log(z)").unwrap().eval(-1.0).is_err());
    assert!(parse_expr("z^-2").unwrap().eval(0.0).is_err());
}

#[test]
fn polynomial_detection() {
    let p = parse_expr("z - z^3").unwrap().to_polynomial().unwrap();
    assert_eq!(p.coeffs(), &[0.0, 1.0, 0.0, -1.0]);
    assert!(parse_expr("sin(z)").unwrap().to_polynomial().is_none());
    assert!(matches!(parse_expr("z + 1").unwrap(), Expr::Binary(BinOp::Add, _, _)));
}

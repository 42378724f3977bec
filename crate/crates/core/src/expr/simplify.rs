use super::{BinOp, Expr};

fn is(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn finite(x: f64) -> Option<Expr> {
    x.is_finite().then_some(Expr::Const(x))
}

pub(super) fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var => e.clone(),
        Expr::Neg(a) => match simplify(a) {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            a => Expr::neg(a),
        },
        Expr::Binary(op, a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
                let folded = match op {
                    BinOp::Add => finite(x + y),
                    BinOp::Sub => finite(x - y),
                    BinOp::Mul => finite(x * y),
                    BinOp::Div if *y != 0.0 => finite(x / y),
                    BinOp::Div => None,
                };
                if let Some(c) = folded {
                    return c;
                }
            }
            match op {
                BinOp::Add if is(&a, 0.0) => b,
                BinOp::Add | BinOp::Sub if is(&b, 0.0) => a,
                BinOp::Sub if is(&a, 0.0) => Expr::neg(b),
                BinOp::Mul if is(&a, 0.0) || is(&b, 0.0) => Expr::Const(0.0),
                BinOp::Mul if is(&a, 1.0) => b,
                BinOp::Mul if is(&b, 1.0) => a,
                BinOp::Mul if is(&a, -1.0) => Expr::neg(b),
                BinOp::Mul if is(&b, -1.0) => Expr::neg(a),
                BinOp::Div if is(&b, 1.0) => a,
                BinOp::Div if is(&a, 0.0) => Expr::Const(0.0),
                _ => Expr::Binary(*op, Box::new(a), Box::new(b)),
            }
        }
        Expr::Pow(a, n) => {
            let a = simplify(a);
            match (*n, &a) {
                (0, _) => Expr::Const(1.0),
                (1, _) => a,
                (_, Expr::Const(c)) if !(*c == 0.0 && *n < 0) => {
                    finite(c.powi(*n)).unwrap_or_else(|| Expr::pow(a.clone(), *n))
                }
                _ => Expr::pow(a, *n),
            }
        }
        Expr::Call(f, a) => {
            let a = simplify(a);
            if let Expr::Const(c) = a {
                if let Some(x) = f.apply(c).and_then(finite) {
                    return x;
                }
            }
            Expr::call(*f, a)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse_expr;

    #[test]
    fn identities() {
        let cases = [
            ("0*z + z*1", "z"),
            ("z^1 - 0", "z"),
            ("z^0", "1"),
            ("--z", "z"),
            ("2*3 + z", "(6 + z)"),
            ("z / 1", "z"),
            ("0 - z", "(-z)"),
        ];
        for (src, want) in cases {
            assert_eq!(parse_expr(src).unwrap().simplify().to_string(), want, "{src}");
        }
    }

    #[test]
    fn does_not_fold_division_by_zero() {
        let e = parse_expr("1/0").unwrap().simplify();
        assert!(e.eval(0.0).is_err());
    }
}

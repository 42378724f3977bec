use super::{BinOp, Expr, Func};

/// Raw derivative; callers simplify.
pub(super) fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Neg(a) => Expr::neg(derivative(a)),
        Expr::Binary(op, a, b) => {
            let (da, db) = (derivative(a), derivative(b));
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinOp::Add => Expr::add(da, db),
                BinOp::Sub => Expr::sub(da, db),
                BinOp::Mul => Expr::add(Expr::mul(da, b), Expr::mul(a, db)),
                BinOp::Div => Expr::div(
                    Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a, db)),
                    Expr::pow(b, 2),
                ),
            }
        }
        Expr::Pow(a, n) => {
            if *n == 0 {
                return Expr::Const(0.0);
            }
            Expr::mul(
                Expr::mul(Expr::Const(*n as f64), Expr::pow((**a).clone(), n - 1)),
                derivative(a),
            )
        }
        Expr::Call(f, a) => {
            let inner = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, inner),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, inner)),
                Func::Exp => Expr::call(Func::Exp, inner),
                Func::Tanh => Expr::sub(
                    Expr::Const(1.0),
                    Expr::pow(Expr::call(Func::Tanh, inner), 2),
                ),
                Func::Log => return Expr::div(derivative(a), inner),
            };
            Expr::mul(outer, derivative(a))
        }
    }
}

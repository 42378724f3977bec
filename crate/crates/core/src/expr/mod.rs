//! Drift expressions in the single variable `z`.
//!
//! Expressions are parsed into an immutable [`Expr`] tree, differentiated
//! symbolically and evaluated in IEEE double precision. The grammar, in order
//! of increasing precedence:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" integer)*
//! primary := number | "z" | func "(" expr ")" | "(" expr ")"
//! func    := sin | cos | exp | tanh | log
//! ```
//!
//! Exponents must be integer literals, optionally negated or parenthesized
//! (`z^3`, `z^-1`, `z^(-2)`).

mod diff;
mod parser;
mod poly;
mod simplify;

use std::fmt;

pub use parser::{parse_expr, ParseError};
pub use poly::Polynomial;

/// Whitelisted elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "tanh" => Some(Func::Tanh),
            "log" => Some(Func::Log),
            _ => None,
        }
    }

    /// Applies the function, or `None` outside its domain.
    fn apply(self, x: f64) -> Option<f64> {
        match self {
            Func::Sin => Some(x.sin()),
            Func::Cos => Some(x.cos()),
            Func::Exp => Some(x.exp()),
            Func::Tanh => Some(x.tanh()),
            Func::Log => (x > 0.0).then(|| x.ln()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree. Immutable once built; `Send + Sync`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power.
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Raised when an expression is evaluated outside its domain.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{reason} in `{expr}` at z = {z} (argument {arg})")]
pub struct EvalError {
    pub expr: String,
    pub z: f64,
    pub arg: f64,
    pub reason: &'static str,
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// Exact symbolic derivative with respect to `z`, constant-folded.
    pub fn differentiate(&self) -> Expr {
        diff::derivative(self).simplify()
    }

    /// Constant folding and identity elimination (`0*x`, `x^1`, `x+0`, ...).
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Evaluates at `z`. Division by zero, `log` of a non-positive number and
    /// negative powers of zero are reported instead of producing NaN/inf.
    pub fn eval(&self, z: f64) -> Result<f64, EvalError> {
        let domain = |e: &Expr, arg: f64, reason| EvalError {
            expr: e.to_string(),
            z,
            arg,
            reason,
        };
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var => Ok(z),
            Expr::Neg(a) => Ok(-a.eval(z)?),
            Expr::Binary(op, a, b) => {
                let x = a.eval(z)?;
                let y = b.eval(z)?;
                Ok(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain(self, y, "division by zero"));
                        }
                        x / y
                    }
                })
            }
            Expr::Pow(a, n) => {
                let x = a.eval(z)?;
                if *n < 0 && x == 0.0 {
                    return Err(domain(self, x, "negative power of zero"));
                }
                Ok(x.powi(*n))
            }
            Expr::Call(f, a) => {
                let x = a.eval(z)?;
                f.apply(x)
                    .ok_or_else(|| domain(self, x, "logarithm of a non-positive number"))
            }
        }
    }

    /// Expands into a polynomial when the tree only uses `+ - *`, non-negative
    /// integer powers and division by constants.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        poly::from_expr(self)
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }
}

/// Fully parenthesized; `parse_expr(&e.to_string())` evaluates bit-identically to `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{}", c)
                }
            }
            Expr::Var => f.write_str("z"),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
            Expr::Pow(a, n) => {
                if *n < 0 {
                    write!(f, "({}^({}))", a, n)
                } else {
                    write!(f, "({}^{})", a, n)
                }
            }
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

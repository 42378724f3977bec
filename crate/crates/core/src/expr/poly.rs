use super::{BinOp, Expr};

/// Dense real polynomial, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0.0]
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = vec![0.0];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k as f64 + 1.0)),
        );
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn powi(&self, n: u32) -> Polynomial {
        (0..n).fold(Polynomial::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Cauchy bound: every real root lies in `[-r, r]`.
    pub fn root_bound(&self) -> f64 {
        if self.degree() == 0 {
            return 0.0;
        }
        let lead = self.leading().abs();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs() / lead)
            .fold(0.0, f64::max)
    }

    /// Real roots in `[lo, hi]`, located by recursive splitting on the roots of
    /// the derivative (between consecutive critical points the polynomial is
    /// monotone) and bisection.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.is_zero() || lo > hi {
            return Vec::new();
        }
        if self.degree() == 0 {
            return Vec::new();
        }
        let mut knots = vec![lo];
        knots.extend(self.derivative().real_roots_in(lo, hi));
        knots.push(hi);
        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            let root = if fa == 0.0 {
                Some(a)
            } else if fb == 0.0 {
                Some(b)
            } else if fa.signum() != fb.signum() {
                Some(bisect(|x| self.eval(x), a, b, fa))
            } else {
                None
            };
            if let Some(r) = root {
                if roots.last().map_or(true, |&last| (r - last).abs() > 1e-12 * (1.0 + r.abs())) {
                    roots.push(r);
                }
            }
        }
        roots
    }

    /// Infimum over the real line, or `None` when unbounded below.
    pub fn global_min(&self) -> Option<f64> {
        let d = self.degree();
        if d == 0 {
            return Some(self.coeffs[0]);
        }
        if d % 2 == 1 || self.leading() < 0.0 {
            return None;
        }
        let r = self.derivative().root_bound();
        self.derivative()
            .real_roots_in(-r, r)
            .into_iter()
            .map(|x| self.eval(x))
            .reduce(f64::min)
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub(super) fn from_expr(e: &Expr) -> Option<Polynomial> {
    Some(match e {
        Expr::Const(c) => Polynomial::constant(*c),
        Expr::Var => Polynomial::new(vec![0.0, 1.0]),
        Expr::Neg(a) => from_expr(a)?.scale(-1.0),
        Expr::Binary(op, a, b) => {
            let pa = from_expr(a)?;
            let pb = from_expr(b)?;
            match op {
                BinOp::Add => pa.add(&pb),
                BinOp::Sub => pa.sub(&pb),
                BinOp::Mul => pa.mul(&pb),
                BinOp::Div => {
                    if pb.degree() != 0 || pb.coeffs[0] == 0.0 {
                        return None;
                    }
                    pa.scale(1.0 / pb.coeffs[0])
                }
            }
        }
        Expr::Pow(a, n) => {
            if *n < 0 {
                return None;
            }
            from_expr(a)?.powi(*n as u32)
        }
        Expr::Call(..) => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn expands_double_well() {
        let p = parse_expr("z - z^3").unwrap().to_polynomial().unwrap();
        assert_eq!(p.coeffs(), &[0.0, 1.0, 0.0, -1.0]);
        assert_eq!(p.derivative().coeffs(), &[1.0, 0.0, -3.0]);
        assert_eq!(p.antiderivative().derivative(), p);
    }

    #[test]
    fn roots_and_minimum() {
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        let r = p.real_roots_in(-5.0, 5.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
        assert_eq!(p.global_min(), Some(-1.0));
        // f'(z) = 1 - 3z^2 is unbounded below
        assert_eq!(Polynomial::new(vec![1.0, 0.0, -3.0]).global_min(), None);
        // z^4 - 2z^2 has minimum -1 at z = +-1
        let q = Polynomial::new(vec![0.0, 0.0, -2.0, 0.0, 1.0]);
        assert!((q.global_min().unwrap() + 1.0).abs() < 1e-14);
    }
}

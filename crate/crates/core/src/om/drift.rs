use crate::expr::{parse_expr, EvalError, Expr, ParseError, Polynomial};

/// `f` and its first three derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftValues {
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub fppp: f64,
}

/// Drift `f` with symbolic derivatives. Derivatives are always derived from
/// `f`, never supplied.
#[derive(Debug, Clone)]
pub struct DriftModel {
    f: Expr,
    f_prime: Expr,
    f_double_prime: Expr,
    f_triple_prime: Expr,
    // Horner fast path for polynomial drifts: [f, f', f'', f''']
    poly: Option<[Polynomial; 4]>,
    pub lipschitz_hint: Option<f64>,
    pub derivative_lower_bound_hint: Option<f64>,
}

impl DriftModel {
    pub fn new(f: Expr) -> Self {
        let f_prime = f.differentiate();
        let f_double_prime = f_prime.differentiate();
        let f_triple_prime = f_double_prime.differentiate();
        let poly = f.to_polynomial().map(|p| {
            let p1 = p.derivative();
            let p2 = p1.derivative();
            let p3 = p2.derivative();
            [p, p1, p2, p3]
        });
        DriftModel {
            f,
            f_prime,
            f_double_prime,
            f_triple_prime,
            poly,
            lipschitz_hint: None,
            derivative_lower_bound_hint: None,
        }
    }

    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Ok(DriftModel::new(parse_expr(source)?))
    }

    pub fn expr(&self) -> &Expr {
        &self.f
    }

    pub fn f_prime(&self) -> &Expr {
        &self.f_prime
    }

    pub fn f_double_prime(&self) -> &Expr {
        &self.f_double_prime
    }

    pub fn f_triple_prime(&self) -> &Expr {
        &self.f_triple_prime
    }

    /// Polynomial form of `f`, when it has one.
    pub fn polynomial(&self) -> Option<&Polynomial> {
        self.poly.as_ref().map(|p| &p[0])
    }

    pub fn f(&self, z: f64) -> Result<f64, EvalError> {
        match &self.poly {
            Some(p) => Ok(p[0].eval(z)),
            None => self.f.eval(z),
        }
    }

    pub fn fp(&self, z: f64) -> Result<f64, EvalError> {
        match &self.poly {
            Some(p) => Ok(p[1].eval(z)),
            None => self.f_prime.eval(z),
        }
    }

    pub fn values(&self, z: f64) -> Result<DriftValues, EvalError> {
        Ok(match &self.poly {
            Some(p) => DriftValues {
                f: p[0].eval(z),
                fp: p[1].eval(z),
                fpp: p[2].eval(z),
                fppp: p[3].eval(z),
            },
            None => DriftValues {
                f: self.f.eval(z)?,
                fp: self.f_prime.eval(z)?,
                fpp: self.f_double_prime.eval(z)?,
                fppp: self.f_triple_prime.eval(z)?,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_tree_paths_agree() {
        let m = DriftModel::parse("z - z^3").unwrap();
        assert!(m.polynomial().is_some());
        for z in [-1.5, -0.2, 0.0, 0.8, 2.0] {
            let v = m.values(z).unwrap();
            assert!((v.f - m.expr().eval(z).unwrap()).abs() < 1e-14);
            assert!((v.fp - m.f_prime().eval(z).unwrap()).abs() < 1e-14);
            assert!((v.fpp - m.f_double_prime().eval(z).unwrap()).abs() < 1e-14);
            assert_eq!(v.fppp, -6.0);
        }
    }

    #[test]
    fn transcendental_drift_uses_tree() {
        let m = DriftModel::parse("sin(z)").unwrap();
        assert!(m.polynomial().is_none());
        let v = m.values(0.3).unwrap();
        assert_eq!(v.fp, 0.3f64.cos());
        assert_eq!(v.fppp, -(0.3f64.cos()));
    }
}

//! Onsager–Machlup Lagrangian for `dX = f(X) dt + c dB + compensated small jumps`:
//!
//! ```text
//! OM(ż, z) = ((ż - f(z)) / c)² + f'(z) + 2 (ż - f(z)) d_ν / c²
//!          = (ż - f(z) + d_ν)² / c² + f'(z) - (d_ν / c)²
//! ```
//!
//! Both forms are exposed; the second (complete-square) form is used for
//! actions and optimization.

mod action;
mod checks;
mod drift;
mod path;

pub use action::{action_hessian, om_action, om_action_gradient, om_action_nodes};
pub use checks::{
    check_convexity, check_theorem51, ConvexityReport, ConvexityViolation, DerivativeCheck,
    Region, Theorem51Report,
};
pub use drift::{DriftModel, DriftValues};
pub use path::{PathError, PathGrid};

use crate::expr::EvalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OmError {
    #[error("diffusion constant c = {0} must be positive and finite")]
    Diffusion(f64),
    #[error("Lévy drift constant d_nu = {0} must be finite")]
    DriftConstant(f64),
}

#[derive(Debug, Clone)]
pub struct OmLagrangian {
    drift: DriftModel,
    c: f64,
    d_nu: f64,
}

impl OmLagrangian {
    pub fn new(drift: DriftModel, c: f64, d_nu: f64) -> Result<Self, OmError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(OmError::Diffusion(c));
        }
        if !d_nu.is_finite() {
            return Err(OmError::DriftConstant(d_nu));
        }
        Ok(OmLagrangian { drift, c, d_nu })
    }

    pub fn drift(&self) -> &DriftModel {
        &self.drift
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d_nu(&self) -> f64 {
        self.d_nu
    }

    /// Same drift and diffusion, different jump drift constant.
    pub fn with_d_nu(&self, d_nu: f64) -> Result<Self, OmError> {
        OmLagrangian::new(self.drift.clone(), self.c, d_nu)
    }

    /// Expanded form: `((ż-f)/c)² + f' + 2(ż-f) d_ν / c²`.
    pub fn value(&self, z: f64, zdot: f64) -> Result<f64, EvalError> {
        let v = self.drift.values(z)?;
        let r = zdot - v.f;
        Ok((r / self.c).powi(2) + v.fp + 2.0 * r * self.d_nu / (self.c * self.c))
    }

    /// Complete-square form: `(ż - f + d_ν)² / c² + f' - (d_ν/c)²`.
    pub fn value_rewritten(&self, z: f64, zdot: f64) -> Result<f64, EvalError> {
        let v = self.drift.values(z)?;
        Ok(self.rewritten_from(&v, zdot))
    }

    #[inline]
    fn rewritten_from(&self, v: &DriftValues, zdot: f64) -> f64 {
        let c2 = self.c * self.c;
        let r = zdot - v.f + self.d_nu;
        r * r / c2 + v.fp - self.d_nu * self.d_nu / c2
    }

    /// `(∂OM/∂z, ∂OM/∂ż)`.
    pub fn partials(&self, z: f64, zdot: f64) -> Result<(f64, f64), EvalError> {
        let v = self.drift.values(z)?;
        Ok(self.partials_from(&v, zdot))
    }

    #[inline]
    fn partials_from(&self, v: &DriftValues, zdot: f64) -> (f64, f64) {
        let c2 = self.c * self.c;
        let r = zdot - v.f + self.d_nu;
        (-2.0 * v.fp * r / c2 + v.fpp, 2.0 * r / c2)
    }

    /// Second partials `(∂²/∂z², ∂²/∂z∂ż, ∂²/∂ż²)`.
    pub fn second_partials(&self, z: f64, zdot: f64) -> Result<(f64, f64, f64), EvalError> {
        let v = self.drift.values(z)?;
        Ok(self.second_partials_from(&v, zdot))
    }

    #[inline]
    fn second_partials_from(&self, v: &DriftValues, zdot: f64) -> (f64, f64, f64) {
        let c2 = self.c * self.c;
        let r = zdot - v.f + self.d_nu;
        (
            2.0 * (v.fp * v.fp - v.fpp * r) / c2 + v.fppp,
            -2.0 * v.fp / c2,
            2.0 / c2,
        )
    }
}

pub fn om_value(l: &OmLagrangian, z: f64, zdot: f64) -> Result<f64, EvalError> {
    l.value(z, zdot)
}

pub fn om_rewritten_value(l: &OmLagrangian, z: f64, zdot: f64) -> Result<f64, EvalError> {
    l.value_rewritten(z, zdot)
}

pub fn om_partials(l: &OmLagrangian, z: f64, zdot: f64) -> Result<(f64, f64), EvalError> {
    l.partials(z, zdot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag(src: &str, c: f64, d: f64) -> OmLagrangian {
        OmLagrangian::new(DriftModel::parse(src).unwrap(), c, d).unwrap()
    }

    #[test]
    fn rejects_bad_constants() {
        let drift = DriftModel::parse("-z").unwrap();
        assert!(OmLagrangian::new(drift.clone(), 0.0, 0.0).is_err());
        assert!(OmLagrangian::new(drift.clone(), -1.0, 0.0).is_err());
        assert!(OmLagrangian::new(drift, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn gaussian_linear_value_at_origin() {
        assert_eq!(lag("-z", 1.0, 0.0).value(0.0, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn double_well_value_at_origin() {
        for d in [0.0, 0.7, -1.3] {
            let l = lag("z - z^3", 1.0, d);
            assert_eq!(l.value(0.0, 0.0).unwrap(), 1.0);
            // matches the expanded double-well form
            let (z, zd) = (0.4, -0.3);
            let direct = (z - z * z * z - zd) * (z - z * z * z - zd) + 1.0 - 3.0 * z * z
                + 2.0 * (zd - z + z * z * z) * d;
            assert!((l.value(z, zd).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishing_bracket() {
        let d = 0.8;
        let l = lag("0", 1.0, d);
        assert_eq!(l.value_rewritten(3.7, -d).unwrap(), -d * d);
    }

    #[test]
    fn partials_linear_example() {
        let (dz, dzd) = lag("-z", 1.0, 0.0).partials(1.0, 0.0).unwrap();
        assert_eq!(dzd, 2.0);
        assert_eq!(dz, 2.0);
    }

    #[test]
    fn zdot_partial_is_affine_with_slope_two_over_c_squared() {
        let l = lag("sin(z) + z^2", 0.7, 0.3);
        let p = |zd| l.partials(0.4, zd).unwrap().1;
        let slope = (p(1.0) - p(-1.0)) / 2.0;
        assert!((slope - 2.0 / 0.49).abs() < 1e-12);
        assert!((p(0.5) - (p(-1.0) + p(2.0)) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_reduction_is_exact() {
        let l = lag("z - z^3", 1.3, 0.0);
        for &(z, zd) in &[(0.3, 0.1), (-1.2, 2.0), (0.9, -0.4)] {
            let f: f64 = z - z * z * z;
            let fp = 1.0 - 3.0 * z * z;
            assert_eq!(l.value(z, zd).unwrap(), ((zd - f) / 1.3).powi(2) + fp);
        }
    }

    #[test]
    fn domain_error_propagates() {
        let l = lag("log(z)", 1.0, 0.0);
        assert!(l.value(-1.0, 0.0).is_err());
        assert!(l.partials(0.0, 0.0).is_err());
    }
}

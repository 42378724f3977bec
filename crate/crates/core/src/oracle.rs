//! Reference solutions used to validate the solvers.

use crate::expr::EvalError;
use crate::om::{OmLagrangian, PathError, PathGrid};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("horizon T = {0} must be positive and finite")]
    Horizon(f64),
    #[error("the EL residual needs at least 8 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error(transparent)]
    Domain(#[from] EvalError),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Solution of `z̈ = z + d` on `[0, T]` with `z(0) = x0`, `z(T) = x1`:
///
/// ```text
/// z(t) = (c1 + d/2) e^t + (c2 + d/2) e^(-t) - d
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearBvpClosedForm {
    pub x0: f64,
    pub x1: f64,
    pub t: f64,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Builds the closed form by solving the 2×2 boundary system directly.
pub fn linear_closed_form(x0: f64, x1: f64, t: f64, d: f64) -> Result<LinearBvpClosedForm, OracleError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(OracleError::Horizon(t));
    }
    // A + B = x0 + d,  A e^T + B e^-T = x1 + d, with A = c1 + d/2, B = c2 + d/2
    let (ep, em) = (t.exp(), (-t).exp());
    let (r0, r1) = (x0 + d, x1 + d);
    let a = (r1 - r0 * em) / (ep - em);
    let b = r0 - a;
    Ok(LinearBvpClosedForm { x0, x1, t, d, c1: a - 0.5 * d, c2: b - 0.5 * d })
}

impl LinearBvpClosedForm {
    pub fn z(&self, t: f64) -> f64 {
        let h = 0.5 * self.d;
        (self.c1 + h) * t.exp() + (self.c2 + h) * (-t).exp() - self.d
    }

    pub fn zdot(&self, t: f64) -> f64 {
        let h = 0.5 * self.d;
        (self.c1 + h) * t.exp() - (self.c2 + h) * (-t).exp()
    }

    /// Samples on `n` uniform intervals of `[0, T]`; end nodes are set exactly.
    pub fn grid(&self, n: usize) -> Result<PathGrid, PathError> {
        let mut g = PathGrid::from_fn(0.0, self.t, n, |t| self.z(t))?.into_values();
        g[0] = self.x0;
        g[n] = self.x1;
        PathGrid::new(0.0, self.t, g)
    }
}

fn d4(v: &[f64], i: usize, dt: f64) -> f64 {
    (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * dt)
}

/// `max_i |d/dt ∂OM/∂ż - ∂OM/∂z|` over nodes `4..=n-4`, with fourth-order
/// central differences for both `ż` and the time derivative.
pub fn el_residual(l: &OmLagrangian, grid: &PathGrid) -> Result<f64, OracleError> {
    let n = grid.n();
    if n < 8 {
        return Err(OracleError::TooFewIntervals(n));
    }
    let z = grid.values();
    let dt = grid.dt();
    let mut zdot = vec![0.0; n + 1];
    let mut p = vec![0.0; n + 1];
    let mut q = vec![0.0; n + 1];
    for i in 2..=n - 2 {
        zdot[i] = d4(z, i, dt);
        let (dz, dzd) = l.partials(z[i], zdot[i])?;
        q[i] = dz;
        p[i] = dzd;
    }
    Ok((4..=n - 4).map(|i| (d4(&p, i, dt) - q[i]).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::om::DriftModel;

    #[test]
    fn boundary_values() {
        let cf = linear_closed_form(3.0, 4.0, 1.0, 1.0).unwrap();
        assert!((cf.z(0.0) - 3.0).abs() < 1e-12);
        assert!((cf.z(1.0) - 4.0).abs() < 1e-12);
        assert!(linear_closed_form(0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn homogeneous_problem() {
        let cf = linear_closed_form(0.0, 0.0, 2.0, 0.0).unwrap();
        assert_eq!((cf.c1, cf.c2), (0.0, 0.0));
        assert_eq!(cf.z(1.3), 0.0);
    }

    #[test]
    fn residual_controls() {
        let l = OmLagrangian::new(DriftModel::parse("0").unwrap(), 1.0, 0.0).unwrap();
        let line = PathGrid::linear(0.0, 1.0, -1.0, 2.0, 100).unwrap();
        assert!(el_residual(&l, &line).unwrap() <= 1e-10);
        let bent = PathGrid::from_fn(0.0, 1.0, 100, |t| t * t).unwrap();
        assert!((el_residual(&l, &bent).unwrap() - 4.0).abs() < 1e-6);
        let short = PathGrid::linear(0.0, 1.0, 0.0, 1.0, 7).unwrap();
        assert!(matches!(el_residual(&l, &short), Err(OracleError::TooFewIntervals(7))));
    }
}

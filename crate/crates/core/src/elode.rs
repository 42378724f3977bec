//! Euler–Lagrange equation of the OM action and a fixed-step RK4 integrator.
//!
//! The OM Lagrangian has no explicit time dependence and its ż-dependence is a
//! pure square, so the EL equation reduces to an autonomous second-order ODE
//!
//! ```text
//! z̈ = (c²/2) f''(z) + f'(z) f(z) - f'(z) d_ν
//! ```

use crate::expr::{EvalError, Polynomial};
use crate::om::OmLagrangian;
use serde::Serialize;

pub const DEFAULT_GUARD: f64 = 1e8;
pub const MAX_STEPS: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IvpError {
    #[error("step h = {0} must be positive and finite")]
    Step(f64),
    #[error("time window [{s}, {u}] must satisfy s <= u")]
    Window { s: f64, u: f64 },
    #[error("{0} steps exceed the limit of 1e8")]
    TooManySteps(f64),
    #[error("trajectory left |z| <= guard at t = {t} (z = {z})")]
    Divergence { t: f64, z: f64 },
    #[error(transparent)]
    Domain(#[from] EvalError),
}

#[derive(Debug, Clone)]
pub struct ElOde {
    lagrangian: OmLagrangian,
    poly: Option<Polynomial>,
    guard: f64,
}

/// Builds the EL equation for `l`.
pub fn assemble_el(l: &OmLagrangian) -> ElOde {
    let poly = l.drift().polynomial().map(|f| {
        let fp = f.derivative();
        let fpp = fp.derivative();
        fpp.scale(0.5 * l.c() * l.c())
            .add(&fp.mul(f))
            .sub(&fp.scale(l.d_nu()))
    });
    ElOde { lagrangian: l.clone(), poly, guard: DEFAULT_GUARD }
}

impl ElOde {
    pub fn lagrangian(&self) -> &OmLagrangian {
        &self.lagrangian
    }

    /// The right-hand side as a polynomial, for polynomial drifts.
    pub fn polynomial(&self) -> Option<&Polynomial> {
        self.poly.as_ref()
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    /// Same drift and diffusion with a different jump drift constant.
    pub fn with_d_nu(&self, d_nu: f64) -> Result<Self, crate::om::OmError> {
        Ok(assemble_el(&self.lagrangian.with_d_nu(d_nu)?).with_guard(self.guard))
    }

    #[inline]
    pub fn rhs(&self, z: f64) -> Result<f64, EvalError> {
        if let Some(p) = &self.poly {
            return Ok(p.eval(z));
        }
        let v = self.lagrangian.drift().values(z)?;
        let c = self.lagrangian.c();
        Ok(0.5 * c * c * v.fpp + v.fp * v.f - v.fp * self.lagrangian.d_nu())
    }

    /// `E = ż²/2 - V(z)` with `V' = rhs`, conserved along exact solutions.
    /// Polynomial drifts only.
    pub fn energy(&self, z: f64, zdot: f64) -> Option<f64> {
        self.poly
            .as_ref()
            .map(|p| 0.5 * zdot * zdot - p.antiderivative().eval(z))
    }

    #[inline]
    fn step(&self, z: f64, v: f64, h: f64) -> Result<(f64, f64), EvalError> {
        let a1 = self.rhs(z)?;
        let z2 = z + 0.5 * h * v;
        let v2 = v + 0.5 * h * a1;
        let a2 = self.rhs(z2)?;
        let z3 = z + 0.5 * h * v2;
        let v3 = v + 0.5 * h * a2;
        let a3 = self.rhs(z3)?;
        let z4 = z + h * v3;
        let v4 = v + h * a3;
        let a4 = self.rhs(z4)?;
        Ok((
            z + h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
            v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        ))
    }

    /// Runs RK4 from `s` to `u`, calling `visit` after every step with `(t, z, ż)`.
    fn run(
        &self,
        z0: f64,
        v0: f64,
        s: f64,
        u: f64,
        h: f64,
        mut visit: impl FnMut(f64, f64, f64),
    ) -> Result<(f64, f64), IvpError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(IvpError::Step(h));
        }
        if !(s <= u) {
            return Err(IvpError::Window { s, u });
        }
        let steps = step_count(s, u, h);
        if steps as f64 > MAX_STEPS {
            return Err(IvpError::TooManySteps(steps as f64));
        }
        let (mut z, mut v) = (z0, v0);
        for k in 0..steps {
            let t0 = s + k as f64 * h;
            let t1 = if k + 1 == steps { u } else { s + (k + 1) as f64 * h };
            let (zn, vn) = self.step(z, v, t1 - t0)?;
            if !(zn.abs() <= self.guard) || !vn.is_finite() {
                // NaN carries no direction; fall back to the last finite state
                let dir = if zn.is_nan() { z + v * (t1 - t0) } else { zn };
                return Err(IvpError::Divergence { t: t1, z: dir });
            }
            z = zn;
            v = vn;
            visit(t1, z, v);
        }
        Ok((z, v))
    }

    /// End state `(z(u), ż(u))` without recording the trajectory.
    pub fn end_state(&self, z0: f64, v0: f64, s: f64, u: f64, h: f64) -> Result<(f64, f64), IvpError> {
        self.run(z0, v0, s, u, h, |_, _, _| {})
    }
}

fn step_count(s: f64, u: f64, h: f64) -> usize {
    let r = (u - s) / h;
    // tolerate roundoff so that e.g. 1.0 / 1e-3 gives 1000 steps, not 1001
    let n = (r - 1e-9 * r.max(1.0)).ceil();
    n.max(if u > s { 1.0 } else { 0.0 }) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IvpSolution {
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    pub zdot: Vec<f64>,
    pub h: f64,
}

impl IvpSolution {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> (f64, f64, f64) {
        let k = self.len() - 1;
        (self.t[k], self.z[k], self.zdot[k])
    }

    /// The trajectory as a [`crate::om::PathGrid`], if its nodes are uniform.
    pub fn to_grid(&self) -> Option<crate::om::PathGrid> {
        let samples: Vec<(f64, f64)> = self.t.iter().copied().zip(self.z.iter().copied()).collect();
        crate::om::PathGrid::from_samples(&samples).ok()
    }
}

/// Classical RK4 for `(z, ż)' = (ż, rhs(z))`. The last step is shortened so the
/// final node lands on `u`.
pub fn integrate_ivp(ode: &ElOde, z0: f64, v0: f64, s: f64, u: f64, h: f64) -> Result<IvpSolution, IvpError> {
    let cap = if h > 0.0 && h.is_finite() && s <= u {
        (step_count(s, u, h) as f64).min(MAX_STEPS) as usize + 1
    } else {
        0
    };
    let mut sol = IvpSolution {
        t: Vec::with_capacity(cap),
        z: Vec::with_capacity(cap),
        zdot: Vec::with_capacity(cap),
        h,
    };
    sol.t.push(s);
    sol.z.push(z0);
    sol.zdot.push(v0);
    ode.run(z0, v0, s, u, h, |t, z, v| {
        sol.t.push(t);
        sol.z.push(z);
        sol.zdot.push(v);
    })?;
    Ok(sol)
}

//! Discrete OM action on a [`PathGrid`] by the midpoint rule:
//!
//! ```text
//! A[z] = Σ_i dt · OM((z_{i+1} - z_i)/dt, (z_i + z_{i+1})/2)
//! ```
//!
//! Second order in `dt`. Each term couples two neighbouring nodes only, so the
//! gradient is local and the Hessian is exactly tridiagonal.

use super::{OmLagrangian, PathGrid};
use crate::expr::EvalError;
use crate::linalg::SymTridiagonal;

fn for_each_interval(
    l: &OmLagrangian,
    grid: &PathGrid,
    mut visit: impl FnMut(usize, &super::DriftValues, f64),
) -> Result<(), EvalError> {
    let z = grid.values();
    let dt = grid.dt();
    for i in 0..grid.n() {
        let mid = 0.5 * (z[i] + z[i + 1]);
        let vel = (z[i + 1] - z[i]) / dt;
        let v = l.drift().values(mid)?;
        visit(i, &v, vel);
    }
    Ok(())
}

pub fn om_action(l: &OmLagrangian, grid: &PathGrid) -> Result<f64, EvalError> {
    let dt = grid.dt();
    let mut sum = 0.0;
    for_each_interval(l, grid, |_, v, vel| sum += l.rewritten_from(v, vel))?;
    Ok(sum * dt)
}

/// Midpoint-rule action on arbitrary increasing nodes `t` with values `z`.
pub fn om_action_nodes(l: &OmLagrangian, t: &[f64], z: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(t.len(), z.len(), "node count mismatch");
    let mut sum = 0.0;
    for i in 0..t.len().saturating_sub(1) {
        let dt = t[i + 1] - t[i];
        let v = l.drift().values(0.5 * (z[i] + z[i + 1]))?;
        sum += dt * l.rewritten_from(&v, (z[i + 1] - z[i]) / dt);
    }
    Ok(sum)
}

/// Exact gradient of [`om_action`] with respect to the `n - 1` interior nodes.
pub fn om_action_gradient(l: &OmLagrangian, grid: &PathGrid) -> Result<Vec<f64>, EvalError> {
    let n = grid.n();
    let dt = grid.dt();
    let mut grad = vec![0.0; n - 1];
    for_each_interval(l, grid, |i, v, vel| {
        let (lz, lv) = l.partials_from(v, vel);
        // node i (left end of the interval), node i + 1 (right end)
        if i >= 1 {
            grad[i - 1] += 0.5 * dt * lz - lv;
        }
        if i + 1 <= n - 1 {
            grad[i] += 0.5 * dt * lz + lv;
        }
    })?;
    Ok(grad)
}

/// Exact Hessian of [`om_action`] over interior nodes.
pub fn action_hessian(l: &OmLagrangian, grid: &PathGrid) -> Result<SymTridiagonal, EvalError> {
    let n = grid.n();
    let dt = grid.dt();
    let mut diag = vec![0.0; n - 1];
    let mut off = vec![0.0; n.saturating_sub(2)];
    for_each_interval(l, grid, |i, v, vel| {
        let (lzz, lzv, lvv) = l.second_partials_from(v, vel);
        let base = 0.25 * dt * lzz + lvv / dt;
        if i >= 1 {
            diag[i - 1] += base - lzv;
        }
        if i + 1 <= n - 1 {
            diag[i] += base + lzv;
        }
        if i >= 1 && i + 1 <= n - 1 {
            off[i - 1] += 0.25 * dt * lzz - lvv / dt;
        }
    })?;
    Ok(SymTridiagonal::new(diag, off))
}
